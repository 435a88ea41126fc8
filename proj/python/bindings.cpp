#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "afc/agent/model_io.hpp"
#include "afc/agent/policy.hpp"
#include "afc/broker/client.hpp"
#include "afc/broker/server.hpp"
#include "afc/broker/wire.hpp"
#include "afc/errors.hpp"
#include "afc/orchestrator/config.hpp"
#include "afc/orchestrator/rewards.hpp"
#include "afc/orchestrator/signal.hpp"
#include "afc/orchestrator/simulation.hpp"

namespace py = pybind11;
using namespace afc;

namespace {

using f64_array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const f64_array& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

template <typename T>
py::array shaped(const broker::Tensor& t) {
    std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
    py::array_t<T> out(shape);
    std::memcpy(out.mutable_data(), t.data.data(), t.data.size());
    return out;
}

py::array to_numpy(const broker::Tensor& t) {
    switch (t.dtype) {
        case broker::DType::F32: return shaped<float>(t);
        case broker::DType::F64: return shaped<double>(t);
        case broker::DType::I64: return shaped<std::int64_t>(t);
    }
    throw FormatError("unknown dtype");
}

broker::Tensor from_numpy(const py::array& a) {
    broker::Tensor t;
    const auto kind = a.dtype();
    py::array c;
    if (kind.is(py::dtype::of<float>())) {
        t.dtype = broker::DType::F32;
        c = py::array_t<float, py::array::c_style | py::array::forcecast>(a);
    } else if (kind.is(py::dtype::of<std::int64_t>())) {
        t.dtype = broker::DType::I64;
        c = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>(a);
    } else {
        t.dtype = broker::DType::F64;
        c = py::array_t<double, py::array::c_style | py::array::forcecast>(a);
    }
    for (py::ssize_t i = 0; i < c.ndim(); ++i) t.dims.push_back(static_cast<std::uint64_t>(c.shape(i)));
    const auto* p = static_cast<const std::uint8_t*>(c.data());
    t.data.assign(p, p + c.nbytes());
    return t;
}

py::bytes encode_frame(int op, const std::string& key, py::object tensor, std::uint32_t timeout_ms) {
    broker::Frame f;
    f.op = static_cast<broker::Opcode>(op);
    f.key = key;
    f.timeout_ms = timeout_ms;
    if (!tensor.is_none()) f.tensor = from_numpy(py::array(tensor));
    const auto bytes = broker::encode(f);
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

py::dict decode_frame(const py::bytes& data) {
    const std::string_view s = data;
    const auto f = broker::decode({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    py::dict d;
    d["op"] = static_cast<int>(f.op);
    d["key"] = f.key;
    d["timeout_ms"] = f.timeout_ms;
    d["tensor"] = broker::has_tensor(f.op) ? py::object(to_numpy(f.tensor)) : py::none();
    return d;
}

class Policy {
public:
    explicit Policy(const std::string& path) : params_(agent::load_model_file(path)) {}
    double act(const f64_array& obs, double q_max) const {
        agent::Rng rng(0);
        return agent::act(view(obs), params_, agent::ActMode::Deterministic, rng, q_max).q;
    }
    int obs_dim() const { return params_.obs_dim(); }
    int hidden() const { return params_.hidden(); }

private:
    agent::PolicyParams<float> params_;
};

class PySimulation {
public:
    explicit PySimulation(const std::string& config_text)
        : config_(orchestrator::parse_run_config(config_text)), sim_(config_.sim, config_.jets) {}

    void reset(double amplitude) { sim_.reset_perturbed(amplitude); }
    py::tuple advance(const f64_array& q, double duration) {
        orchestrator::IntervalResult r;
        {
            py::gil_scoped_release release;
            r = sim_.advance(view(q), duration);
        }
        return py::make_tuple(r.cd, r.cl);
    }
    py::array observe() const {
        const auto obs = sim_.observe();
        const auto n = static_cast<py::ssize_t>(obs.size());
        const auto m = n ? static_cast<py::ssize_t>(obs[0].size()) : 0;
        py::array_t<double> out({n, m});
        for (py::ssize_t i = 0; i < n; ++i) std::copy(obs[i].begin(), obs[i].end(), out.mutable_data(i, 0));
        return out;
    }
    double time() const { return sim_.field().t; }
    int n_pe() const { return sim_.n_pe(); }

private:
    orchestrator::RunConfig config_;
    orchestrator::Simulation sim_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cylinder wake control: rewards, signal statistics, broker protocol and solver access";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<TransportError>(m, "TransportError", PyExc_ConnectionError);
    py::register_exception<broker::BrokerError>(m, "BrokerError", PyExc_RuntimeError);

    m.def(
        "local_reward",
        [](double cd_baseline, double cd, double cl, double alpha) {
            const auto r = orchestrator::local_reward(cd_baseline, cd, cl, alpha);
            return py::make_tuple(r.drag, r.lift, r.total);
        },
        py::arg("cd_baseline"), py::arg("cd"), py::arg("cl"), py::arg("alpha") = 0.3,
        "Returns (drag, lift, total) terms of the local reward.");
    m.def(
        "aggregate_reward", [](const f64_array& r, double beta) { return orchestrator::aggregate_reward(view(r), beta); },
        py::arg("r"), py::arg("beta") = 0.8);

    m.def(
        "signal_statistics",
        [](const f64_array& series, double dt, double expected_st, double min_periods) {
            const auto s = orchestrator::signal_statistics(view(series), dt, expected_st, min_periods);
            py::dict d;
            d["mean"] = s.mean;
            d["sigma"] = s.sigma;
            d["st"] = s.st;
            d["has_peak"] = s.has_peak;
            py::list peaks;
            for (const auto& p : s.peaks) peaks.append(py::make_tuple(p.st, p.power));
            d["peaks"] = peaks;
            return d;
        },
        py::arg("series"), py::arg("dt"), py::arg("expected_st") = 0.17, py::arg("min_periods") = 8.0);

    m.def("encode_frame", &encode_frame, py::arg("op"), py::arg("key") = "", py::arg("tensor") = py::none(),
          py::arg("timeout_ms") = 0);
    m.def("decode_frame", &decode_frame, py::arg("data"));

    py::class_<broker::Server>(m, "BrokerServer")
        .def(py::init<const std::string&, std::uint64_t>(), py::arg("address") = "127.0.0.1:0",
             py::arg("capacity_bytes") = std::uint64_t{64} << 20)
        .def_property_readonly("port", &broker::Server::port)
        .def_property_readonly("address", &broker::Server::address)
        .def("stop", &broker::Server::stop, py::call_guard<py::gil_scoped_release>());

    py::class_<broker::Client>(m, "BrokerClient")
        .def(py::init<const std::string&, std::uint32_t>(), py::arg("address"), py::arg("connect_timeout_ms") = 0)
        .def("put", [](broker::Client& c, const std::string& key, const py::array& a) { c.put(key, from_numpy(a)); })
        .def(
            "get",
            [](broker::Client& c, const std::string& key, std::uint32_t timeout_ms) -> py::object {
                std::optional<broker::Tensor> t;
                {
                    py::gil_scoped_release release;
                    t = c.get(key, timeout_ms);
                }
                return t ? py::object(to_numpy(*t)) : py::none();
            },
            py::arg("key"), py::arg("timeout_ms") = broker::default_get_timeout_ms)
        .def("delete", &broker::Client::del)
        .def("ping", &broker::Client::ping);

    py::class_<Policy>(m, "Policy")
        .def(py::init<const std::string&>(), py::arg("path"))
        .def("act", &Policy::act, py::arg("obs"), py::arg("q_max"), "Deterministic flow rate for one observation.")
        .def_property_readonly("obs_dim", &Policy::obs_dim)
        .def_property_readonly("hidden", &Policy::hidden);

    py::class_<PySimulation>(m, "Simulation")
        .def(py::init<const std::string&>(), py::arg("config_text") = "")
        .def("reset", &PySimulation::reset, py::arg("amplitude") = 0.2)
        .def("advance", &PySimulation::advance, py::arg("q"), py::arg("duration"),
             "Returns per-pe (cd, cl) interval means.")
        .def("observe", &PySimulation::observe)
        .def_property_readonly("time", &PySimulation::time)
        .def_property_readonly("n_pe", &PySimulation::n_pe);

    m.def("default_config", [] { return orchestrator::to_text(orchestrator::RunConfig{}); });
}
