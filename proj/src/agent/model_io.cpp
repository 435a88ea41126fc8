#include "afc/agent/model_io.hpp"

#include <sstream>

#include "afc/errors.hpp"
#include "afc/util/bytes.hpp"

namespace afc::agent {

namespace {

void write_sizes(util::ByteWriter& w, const MlpShape& s) {
    w.u32(static_cast<std::uint32_t>(s.sizes().size()));
    for (int n : s.sizes()) w.u32(static_cast<std::uint32_t>(n));
}

std::vector<int> read_sizes(util::ByteReader& r) {
    const auto n = r.u32();
    if (n < 2 || n > 64) throw FormatError("model: implausible layer count");
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i < n; ++i) sizes.push_back(static_cast<int>(r.u32()));
    return sizes;
}

}  // namespace

std::vector<std::uint8_t> save_model(const PolicyParams<float>& params) {
    util::ByteWriter w;
    w.text("AFCP");
    w.u16(model_version);
    write_sizes(w, params.actor_shape());
    write_sizes(w, params.critic_shape());
    w.u64(params.data().size());
    for (float v : params.data()) w.f32(v);
    w.u64(util::fnv1a(w.buffer()));
    return w.take();
}

PolicyParams<float> load_model(std::span<const std::uint8_t> bytes) {
    util::ByteReader r(bytes);
    if (r.text(4) != "AFCP") throw FormatError("model: bad magic");
    const auto version = r.u16();
    if (version != model_version) {
        std::ostringstream msg;
        msg << "model: format version " << version << ", expected " << model_version;
        throw FormatError(msg.str());
    }
    const auto actor = read_sizes(r);
    const auto critic = read_sizes(r);
    if (actor.size() != 4 || critic != actor) throw FormatError("model: unsupported network layout");
    PolicyParams<float> p(actor[0], actor[1]);
    if (actor != p.actor_shape().sizes()) throw FormatError("model: unsupported network layout");
    const auto count = r.u64();
    if (count != p.data().size()) throw FormatError("model: parameter count does not match layer sizes");
    for (auto& v : p.data()) v = r.f32();
    const std::size_t body = r.position();
    if (r.remaining() != 8 || r.u64() != util::fnv1a(bytes.first(body))) {
        throw FormatError("model: checksum mismatch");
    }
    return p;
}

void save_model_file(const std::string& path, const PolicyParams<float>& params) {
    util::write_file(path, save_model(params));
}

PolicyParams<float> load_model_file(const std::string& path) {
    return load_model(util::read_file(path));
}

}  // namespace afc::agent
