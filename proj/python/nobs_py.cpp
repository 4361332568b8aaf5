// Python bindings for the core operations: plants, gains, observers,
// datasets, the neural observers and their training/evaluation loop.
// Trajectories cross the boundary as numpy copies shaped
// [components, levels, nx]; plain vectors as 1-d arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nobs/bench.hpp"
#include "nobs/checkpoint.hpp"
#include "nobs/dataset.hpp"
#include "nobs/exporter.hpp"
#include "nobs/fno.hpp"
#include "nobs/gains.hpp"
#include "nobs/metrics.hpp"
#include "nobs/observers.hpp"
#include "nobs/train.hpp"

namespace py = pybind11;
using namespace nobs;

namespace {

py::array_t<double> trajectory_array(const Trajectory& t) {
  py::array_t<double> a({static_cast<py::ssize_t>(t.components),
                         static_cast<py::ssize_t>(t.grid.n_levels()),
                         static_cast<py::ssize_t>(t.grid.nx)});
  std::copy(t.values.begin(), t.values.end(), a.mutable_data());
  return a;
}

py::array_t<double> measurements_array(const MeasurementSeries& ms) {
  py::array_t<double> a({static_cast<py::ssize_t>(ms.channels()),
                         static_cast<py::ssize_t>(ms.grid.n_levels())});
  std::copy(ms.values.begin(), ms.values.end(), a.mutable_data());
  return a;
}

}  // namespace

PYBIND11_MODULE(nobs, m) {
  m.doc() = "PDE observer toolbox: plants, backstepping gains, neural observers";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<CflViolation>(m, "CflViolation", base.ptr());
  py::register_exception<GridMismatch>(m, "GridMismatch", base.ptr());
  py::register_exception<KindMismatch>(m, "KindMismatch", base.ptr());
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", base.ptr());
  py::register_exception<TimeOutOfRange>(m, "TimeOutOfRange", base.ptr());
  py::register_exception<NonPhysicalState>(m, "NonPhysicalState", base.ptr());
  py::register_exception<DivisionGuard>(m, "DivisionGuard", base.ptr());
  py::register_exception<ZeroReference>(m, "ZeroReference", base.ptr());
  py::register_exception<BadMagic>(m, "BadMagic", base.ptr());
  py::register_exception<HeaderMismatch>(m, "HeaderMismatch", base.ptr());
  py::register_exception<TruncatedPayload>(m, "TruncatedPayload", base.ptr());
  py::register_exception<MissingCheckpoint>(m, "MissingCheckpoint", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double, int, double>(), py::arg("nx"), py::arg("dx"), py::arg("nt"),
           py::arg("dt"))
      .def_readonly("nx", &Grid::nx)
      .def_readonly("dx", &Grid::dx)
      .def_readonly("nt", &Grid::nt)
      .def_readonly("dt", &Grid::dt)
      .def("n_levels", &Grid::n_levels)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", [](const Grid& g) {
        return "Grid(nx=" + std::to_string(g.nx) + ", dx=" + std::to_string(g.dx) +
               ", nt=" + std::to_string(g.nt) + ", dt=" + std::to_string(g.dt) + ")";
      });

  py::enum_<MeasurementKind>(m, "MeasurementKind")
      .value("DirichletAt1", MeasurementKind::DirichletAt1)
      .value("NeumannAt1", MeasurementKind::NeumannAt1)
      .value("TrafficTriple", MeasurementKind::TrafficTriple);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("grid", &Trajectory::grid)
      .def_readonly("components", &Trajectory::components)
      .def("array", &trajectory_array, "copy as [components, levels, nx]");

  py::class_<MeasurementSeries>(m, "MeasurementSeries")
      .def_readonly("kind", &MeasurementSeries::kind)
      .def_readonly("grid", &MeasurementSeries::grid)
      .def("array", &measurements_array, "copy as [channels, levels]");

  m.def("extract_measurements", &extract_measurements, py::arg("trajectory"), py::arg("kind"));
  m.def("spatial_l2", [](const std::vector<double>& u, double dx) {
    return spatial_l2(u.data(), static_cast<int>(u.size()), dx);
  });

  // ---- plants ----
  py::enum_<RdScheme>(m, "RdScheme")
      .value("Explicit", RdScheme::Explicit)
      .value("ImplicitEuler", RdScheme::ImplicitEuler);
  py::enum_<RightBc>(m, "RightBc")
      .value("NeumannZero", RightBc::NeumannZero)
      .value("DirichletZero", RightBc::DirichletZero);

  py::class_<ReactionDiffusionParams>(m, "ReactionDiffusionParams")
      .def_static("one_peak", &ReactionDiffusionParams::one_peak, py::arg("eps"),
                  py::arg("alpha"), py::arg("beta"))
      .def_static("constant", &ReactionDiffusionParams::constant, py::arg("eps"),
                  py::arg("lambda_"))
      .def_readwrite("epsilon", &ReactionDiffusionParams::epsilon)
      .def_readwrite("right_bc", &ReactionDiffusionParams::right_bc);
  m.def("lambda_profile", &lambda_profile, py::arg("x"), py::arg("params"));
  m.def("simulate_reaction_diffusion", &simulate_reaction_diffusion, py::arg("ic"),
        py::arg("params"), py::arg("grid"), py::arg("scheme") = RdScheme::Explicit);

  py::class_<ArzParams>(m, "ArzParams")
      .def_static("reference", &ArzParams::reference, py::arg("rho_star"), py::arg("v_star"))
      .def_readwrite("L_r", &ArzParams::L_r)
      .def_readwrite("tau", &ArzParams::tau)
      .def_readwrite("rho_max", &ArzParams::rho_max)
      .def_readwrite("v_free", &ArzParams::v_free)
      .def_readonly("rho_star", &ArzParams::rho_star)
      .def_readonly("v_star", &ArzParams::v_star)
      .def_readonly("q_star", &ArzParams::q_star)
      .def("V", &ArzParams::V, py::arg("rho"));
  m.def("simulate_arz", &simulate_arz, py::arg("ic_rho"), py::arg("ic_v"), py::arg("params"),
        py::arg("grid"), py::arg("inflow"), py::arg("outflow_bc"));

  // ---- initial-condition sampling ----
  py::class_<IcSpec>(m, "IcSpec")
      .def(py::init<>())
      .def_readwrite("seed", &IcSpec::seed)
      .def_readwrite("K", &IcSpec::K)
      .def_readwrite("decay", &IcSpec::decay)
      .def_readwrite("amp_rho", &IcSpec::amp_rho)
      .def_readwrite("amp_v", &IcSpec::amp_v);
  m.def("sample_ic_sine", &sample_ic_sine, py::arg("spec"), py::arg("record"), py::arg("grid"));
  m.def("sample_ic_sine_dirichlet", &sample_ic_sine_dirichlet, py::arg("spec"),
        py::arg("record"), py::arg("grid"));
  m.def("sample_ic_traffic", &sample_ic_traffic, py::arg("spec"), py::arg("record"),
        py::arg("params"), py::arg("grid"));

  // ---- gains ----
  m.def("gain_exponential", &gain_exponential, py::arg("x"), py::arg("alpha"), py::arg("beta"),
        py::arg("epsilon"));
  py::class_<ExponentialGain>(m, "ExponentialGain")
      .def_static("sample", &ExponentialGain::sample, py::arg("alpha"), py::arg("beta"),
                  py::arg("epsilon"), py::arg("grid"))
      .def_readonly("sampled", &ExponentialGain::sampled);
  py::class_<PrescribedTimeGain>(m, "PrescribedTimeGain")
      .def(py::init<double, double, int, double>(), py::arg("T"), py::arg("mu"),
           py::arg("n_terms"), py::arg("clamp"))
      .def_static("with_grid", &PrescribedTimeGain::with_grid, py::arg("T"), py::arg("mu"),
                  py::arg("n_terms"), py::arg("grid"))
      .def_readonly("T_horizon", &PrescribedTimeGain::T_horizon)
      .def_readonly("clamp", &PrescribedTimeGain::clamp);
  m.def("gain_prescribed_time", &gain_prescribed_time, py::arg("x"), py::arg("t"),
        py::arg("cfg"));

  // ---- observers ----
  py::enum_<InjectionKind>(m, "InjectionKind")
      .value("OutletFluxError", InjectionKind::OutletFluxError)
      .value("None_", InjectionKind::None);
  py::class_<InjectionConfig>(m, "InjectionConfig")
      .def(py::init<>())
      .def_readwrite("kind", &InjectionConfig::kind)
      .def_readwrite("scale", &InjectionConfig::scale);
  py::class_<TrafficObserverGains>(m, "TrafficObserverGains")
      .def_static("at_reference", &TrafficObserverGains::at_reference, py::arg("params"),
                  py::arg("injection") = InjectionConfig{})
      .def_readonly("lambda1", &TrafficObserverGains::lambda1)
      .def_readonly("lambda2", &TrafficObserverGains::lambda2);
  m.def("run_observer_reaction_diffusion", &run_observer_reaction_diffusion,
        py::arg("measurements"), py::arg("gain"), py::arg("params"), py::arg("grid"),
        py::arg("ic_hat"), py::arg("scheme") = RdScheme::Explicit);
  m.def("run_observer_prescribed_time", &run_observer_prescribed_time, py::arg("measurements"),
        py::arg("gain"), py::arg("params"), py::arg("grid"), py::arg("ic_hat"));
  m.def("run_observer_arz", &run_observer_arz, py::arg("measurements"), py::arg("gains"),
        py::arg("grid"), py::arg("ic_hat_rho"), py::arg("ic_hat_v"));

  // ---- datasets ----
  py::enum_<SystemKind>(m, "SystemKind")
      .value("ReactionDiffusion", SystemKind::ReactionDiffusion)
      .value("PrescribedTime", SystemKind::PrescribedTime)
      .value("Traffic", SystemKind::Traffic);
  py::class_<DatasetRecord>(m, "DatasetRecord")
      .def_readonly("ic_hat", &DatasetRecord::ic_hat)
      .def_readonly("measurements", &DatasetRecord::measurements)
      .def_readonly("target", &DatasetRecord::target)
      .def_readonly("meta", &DatasetRecord::meta);
  py::class_<ChannelStats>(m, "ChannelStats")
      .def_readonly("mean", &ChannelStats::mean)
      .def_readonly("stddev", &ChannelStats::stddev);
  py::class_<Normalization>(m, "Normalization")
      .def_readonly("ic_hat", &Normalization::ic_hat)
      .def_readonly("measurement", &Normalization::measurement)
      .def_readonly("target", &Normalization::target);
  py::class_<Dataset>(m, "Dataset")
      .def_readonly("system", &Dataset::system)
      .def_readonly("grid", &Dataset::grid)
      .def_readonly("records", &Dataset::records)
      .def_readonly("normalization", &Dataset::normalization);
  py::class_<GenerateConfig>(m, "GenerateConfig")
      .def(py::init<>())
      .def_readwrite("system", &GenerateConfig::system)
      .def_readwrite("n", &GenerateConfig::n)
      .def_readwrite("seed", &GenerateConfig::seed)
      .def_readwrite("ic", &GenerateConfig::ic)
      .def_readwrite("rd_params", &GenerateConfig::rd_params)
      .def_readwrite("pt_gain", &GenerateConfig::pt_gain)
      .def_readwrite("arz_params", &GenerateConfig::arz_params)
      .def_readwrite("arz_injection", &GenerateConfig::arz_injection)
      .def_readwrite("rd_scheme", &GenerateConfig::rd_scheme);
  m.def("generate_dataset", &generate_dataset, py::arg("cfg"), py::arg("grid"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));
  m.def("read_dataset", &read_dataset, py::arg("path"));
  m.def("write_arrays", &write_arrays, py::arg("path"), py::arg("arrays"));
  m.def("read_arrays", &read_arrays, py::arg("path"));

  // ---- neural observers ----
  py::enum_<FnoKind>(m, "FnoKind")
      .value("Feedforward", FnoKind::Feedforward)
      .value("Recurrent", FnoKind::Recurrent);
  py::class_<FnoConfig>(m, "FnoConfig")
      .def(py::init<>())
      .def_readwrite("n_layers", &FnoConfig::n_layers)
      .def_readwrite("width", &FnoConfig::width)
      .def_readwrite("modes_x", &FnoConfig::modes_x)
      .def_readwrite("modes_t", &FnoConfig::modes_t)
      .def_readwrite("in_channels", &FnoConfig::in_channels)
      .def_readwrite("out_channels", &FnoConfig::out_channels);
  py::class_<FnoModel>(m, "FnoModel")
      .def_readonly("kind", &FnoModel::kind)
      .def_readonly("cfg", &FnoModel::cfg)
      .def_readonly("system", &FnoModel::system)
      .def_readonly("t_len", &FnoModel::t_len)
      .def_readonly("x_len", &FnoModel::x_len)
      .def("parameter_names", [](const FnoModel& m_) { return m_.params.names; })
      .def("total_parameters", [](const FnoModel& m_) { return m_.params.total_storage(); });
  m.def("make_feedforward_model", &make_feedforward_model, py::arg("train"), py::arg("cfg"),
        py::arg("seed"));
  m.def("make_recurrent_model", &make_recurrent_model, py::arg("train"), py::arg("cfg"),
        py::arg("seed"));
  m.def("feedforward_predict", &feedforward_predict, py::arg("model"), py::arg("record"),
        py::arg("grid"));
  m.def("recurrent_predict", &recurrent_predict, py::arg("model"), py::arg("record"),
        py::arg("grid"));

  // ---- training and evaluation ----
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch", &TrainConfig::batch)
      .def_readwrite("lr_halve_every", &TrainConfig::lr_halve_every)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("log_every", &TrainConfig::log_every)
      .def_property(
          "lr", [](const TrainConfig& c) { return c.adam.lr; },
          [](TrainConfig& c, double v) { c.adam.lr = v; });
  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("epoch_loss", &TrainResult::epoch_loss)
      .def_readonly("wall_seconds", &TrainResult::wall_seconds);
  m.def(
      "train_feedforward",
      [](FnoModel& model, const Dataset& train, const TrainConfig& cfg) {
        return train_feedforward(model, train, cfg);
      },
      py::arg("model"), py::arg("train"), py::arg("cfg"));
  m.def(
      "train_recurrent",
      [](FnoModel& model, const Dataset& train, const TrainConfig& cfg) {
        return train_recurrent(model, train, cfg);
      },
      py::arg("model"), py::arg("train"), py::arg("cfg"));

  m.def("relative_l2",
        py::overload_cast<const Trajectory&, const Trajectory&>(&relative_l2), py::arg("est"),
        py::arg("ref"));
  m.def("error_l2_series", &error_l2_series, py::arg("est"), py::arg("ref"));
  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("mean_rel_l2", &EvalReport::mean_rel_l2)
      .def_readonly("per_record", &EvalReport::per_record);
  m.def("evaluate", &evaluate, py::arg("model"), py::arg("test"));

  // ---- checkpoints ----
  py::class_<Checkpoint>(m, "Checkpoint")
      .def(py::init<>())
      .def_readwrite("model", &Checkpoint::model)
      .def_readwrite("meta", &Checkpoint::meta);
  m.def("write_checkpoint", &write_checkpoint, py::arg("path"), py::arg("checkpoint"));
  m.def("read_checkpoint", &read_checkpoint, py::arg("path"));
}
