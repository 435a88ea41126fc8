#include "afc/flow/checkpoint.hpp"

#include <sstream>

#include "afc/util/bytes.hpp"

namespace afc::flow {

namespace {

constexpr char magic[4] = {'A', 'F', 'C', 'S'};

template <typename Fn>
void for_interior(const Array3& a, Fn&& fn) {
    for (int k = 0; k < a.nk(); ++k) {
        for (int j = 0; j < a.nj(); ++j) {
            for (int i = 0; i < a.ni(); ++i) fn(i, j, k);
        }
    }
}

void write_array(util::ByteWriter& w, const Array3& a) {
    for_interior(a, [&](int i, int j, int k) { w.f64(a(i, j, k)); });
}

void read_array(util::ByteReader& r, Array3& a) {
    for_interior(a, [&](int i, int j, int k) { a(i, j, k) = r.f64(); });
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const FlowField& f, const Grid& g) {
    util::ByteWriter w;
    w.text(std::string_view(magic, 4));
    w.u16(checkpoint_version);
    w.u32(static_cast<std::uint32_t>(g.nx));
    w.u32(static_cast<std::uint32_t>(g.ny));
    w.u32(static_cast<std::uint32_t>(g.nz));
    w.f64(f.t);
    write_array(w, f.u);
    write_array(w, f.v);
    if (g.three_d()) write_array(w, f.w);
    write_array(w, f.p);
    w.u8(f.has_history ? 1 : 0);
    if (f.has_history) {
        w.f64(f.dt_prev);
        write_array(w, f.hu);
        write_array(w, f.hv);
        if (g.three_d()) write_array(w, f.hw);
    }
    w.u64(util::fnv1a(w.buffer()));
    return w.take();
}

FlowField load_checkpoint(std::span<const std::uint8_t> bytes, const FlowSolver& solver) {
    using Kind = CheckpointError::Kind;
    const Grid& g = solver.grid();
    try {
        util::ByteReader r(bytes);
        if (r.text(4) != std::string(magic, 4)) throw CheckpointError(Kind::Corrupt, "checkpoint: bad magic");
        const auto version = r.u16();
        if (version != checkpoint_version) {
            std::ostringstream msg;
            msg << "checkpoint: format version " << version << ", expected " << checkpoint_version;
            throw CheckpointError(Kind::VersionMismatch, msg.str());
        }
        const int nx = static_cast<int>(r.u32());
        const int ny = static_cast<int>(r.u32());
        const int nz = static_cast<int>(r.u32());
        if (nx != g.nx || ny != g.ny || nz != g.nz) {
            std::ostringstream msg;
            msg << "checkpoint: grid " << nx << "x" << ny << "x" << nz << " does not match solver grid "
                << g.nx << "x" << g.ny << "x" << g.nz;
            throw CheckpointError(Kind::ShapeMismatch, msg.str());
        }
        if (bytes.size() < 8) throw CheckpointError(Kind::Corrupt, "checkpoint: truncated payload");
        const auto body = bytes.first(bytes.size() - 8);
        util::ByteReader tail(bytes.last(8));
        FlowField f = solver.make_field();
        f.t = r.f64();
        read_array(r, f.u);
        read_array(r, f.v);
        if (g.three_d()) read_array(r, f.w);
        read_array(r, f.p);
        f.has_history = r.u8() != 0;
        if (f.has_history) {
            f.dt_prev = r.f64();
            read_array(r, f.hu);
            read_array(r, f.hv);
            if (g.three_d()) read_array(r, f.hw);
        }
        if (r.remaining() != 8 || tail.u64() != util::fnv1a(body)) {
            throw CheckpointError(Kind::Corrupt, "checkpoint: checksum mismatch or trailing bytes");
        }
        solver.fill_ghosts(f);
        return f;
    } catch (const CheckpointError&) {
        throw;
    } catch (const FormatError& e) {
        throw CheckpointError(Kind::Corrupt, std::string("checkpoint: ") + e.what());
    }
}

}  // namespace afc::flow
