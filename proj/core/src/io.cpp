#include "demix/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace demix {

namespace {

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["k"] = m.rows();
  j["n"] = m.cols();
  Json re = Json::array();
  Json im = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const Index rows = j.at("k").get<Index>();
  const Index cols = j.at("n").get<Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Index>(re.size()) != rows * cols || static_cast<Index>(im.size()) != rows * cols)
    throw std::invalid_argument("matrix_from_json: array length mismatch");
  Matrix m(rows, cols);
  Index t = 0;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c, ++t)
      m(r, c) = Complex(re[static_cast<size_t>(t)].get<double>(),
                        im[static_cast<size_t>(t)].get<double>());
  return m;
}

double json_finite(double v) {
  // JSON has no NaN/Inf; reports carry them as null via this hook.
  return v;
}

Json scalar_or_null(double v) {
  if (std::isfinite(v)) return Json(json_finite(v));
  return Json(nullptr);
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  Json j;
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

Vector vector_from_json(const Json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw std::invalid_argument("vector_from_json: length mismatch");
  Vector v(static_cast<Index>(re.size()));
  for (size_t i = 0; i < re.size(); ++i)
    v(static_cast<Index>(i)) = Complex(re[i].get<double>(), im[i].get<double>());
  return v;
}

Json tuple_to_json(const MatrixTuple& t, const SupportPattern* support) {
  Json blocks = Json::array();
  for (int i = 0; i < t.components(); ++i) blocks.push_back(matrix_to_json(t.block(i)));
  Json j;
  j["blocks"] = std::move(blocks);
  if (support) {
    Json sets = Json::array();
    for (int i = 0; i < support->components(); ++i) sets.push_back(support->set(i));
    j["supports"] = std::move(sets);
  }
  return j;
}

MatrixTuple tuple_from_json(const Json& j) {
  std::vector<Matrix> blocks;
  for (const auto& b : j.at("blocks")) blocks.push_back(matrix_from_json(b));
  return MatrixTuple(std::move(blocks));
}

std::optional<SupportPattern> support_from_json(const Json& j, const Profile& profile) {
  if (!j.contains("supports")) return std::nullopt;
  std::vector<std::vector<Index>> sets;
  for (const auto& s : j.at("supports")) sets.push_back(s.get<std::vector<Index>>());
  return SupportPattern(profile, std::move(sets));
}

std::string convention_name(Convention c) {
  return c == Convention::ComplexCircular ? "complex" : "real";
}

Convention convention_from_name(const std::string& name) {
  if (name == "complex") return Convention::ComplexCircular;
  if (name == "real") return Convention::Real;
  throw std::invalid_argument("unknown convention '" + name + "'");
}

Json solve_report_to_json(const SolveReport& r) {
  Json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["objective"] = scalar_or_null(r.objective);
  j["primal_residual"] = scalar_or_null(r.primal_residual);
  j["dual_residual"] = scalar_or_null(r.dual_residual);
  j["feasibility_gap"] = scalar_or_null(r.feasibility_gap);
  j["solution"] = tuple_to_json(r.solution);
  return j;
}

Json certificate_to_json(const CertificateReport& r) {
  Json j;
  j["delta"] = scalar_or_null(r.delta);
  j["beta"] = scalar_or_null(r.beta);
  j["eta"] = scalar_or_null(r.eta);
  j["theta"] = scalar_or_null(r.theta);
  j["tau"] = scalar_or_null(r.tau);
  j["rho"] = scalar_or_null(r.rho);
  j["mu"] = scalar_or_null(r.mu);
  j["c1"] = scalar_or_null(r.c1);
  j["c2"] = scalar_or_null(r.c2);
  j["c3"] = scalar_or_null(r.c3);
  j["upsilon_norm"] = scalar_or_null(r.upsilon_norm);
  j["guarantee_holds"] = r.guarantee_holds;
  j["constants_defined"] = r.constants_defined;
  j["iters"] = {{"delta", r.delta_iters}, {"beta", r.beta_iters}, {"cert_cg", r.cert_cg_iters}};
  return j;
}

std::string certificate_csv_header() {
  return "delta,beta,eta,theta,tau,rho,mu,c1,c2,c3,upsilon_norm,guarantee_holds";
}

std::string certificate_csv_row(const CertificateReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.delta << ',' << r.beta << ',' << r.eta << ',' << r.theta << ',' << r.tau << ','
     << r.rho << ',' << r.mu << ',' << r.c1 << ',' << r.c2 << ',' << r.c3 << ','
     << r.upsilon_norm << ',' << (r.guarantee_holds ? 1 : 0);
  return os.str();
}

Json moment_report_to_json(const MomentReport& r) {
  Json j;
  j["sparsity"] = r.sparsity;
  j["convention"] = convention_name(r.convention);
  j["samples"] = r.samples;
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json jc;
    jc["kappa"] = c.kappa;
    jc["j"] = c.j;
    jc["i"] = c.i;
    jc["empirical"] = matrix_to_json(c.empirical);
    jc["predicted"] = matrix_to_json(c.predicted);
    jc["max_abs_deviation"] = c.max_abs_deviation;
    jc["max_se_units"] = scalar_or_null(c.max_se_units);
    cases.push_back(std::move(jc));
  }
  j["cases"] = std::move(cases);
  return j;
}

MeasurementEnsemble ProblemInstance::ensemble() const {
  FrameFamily frames;
  if (dense_frames) {
    frames = frame_kind == "dft" ? FrameFamily(*dense_frames, 1.0, 1.0)
                                 : FrameFamily(*dense_frames);
  } else {
    frames = make_frame_family(profile, q, frame_kind, frame_seed);
  }
  if (dense_sketches)
    return MeasurementEnsemble(std::move(frames), *dense_sketches, convention, sketch_seed);
  return sample_ensemble(profile, std::move(frames), convention, sketch_seed);
}

Json instance_to_json(const ProblemInstance& inst, bool embed_dense) {
  Json j;
  j["schema"] = "demix-instance-v1";
  j["generator"] = "mt19937_64";
  Json prof = Json::array();
  for (const auto& b : inst.profile) prof.push_back({b.rows, b.cols});
  j["profile"] = std::move(prof);
  j["q"] = inst.q;
  j["frame"] = {{"kind", inst.frame_kind}, {"seed", inst.frame_seed}};
  j["sketch_seed"] = inst.sketch_seed;
  j["convention"] = convention_name(inst.convention);
  if (inst.support) {
    Json sets = Json::array();
    for (int i = 0; i < inst.support->components(); ++i) sets.push_back(inst.support->set(i));
    j["support"] = std::move(sets);
  }
  if (inst.planted)
    j["planted"] = tuple_to_json(*inst.planted, inst.support ? &*inst.support : nullptr);
  if (inst.measurements) j["measurements"] = vector_to_json(*inst.measurements);
  j["sigma"] = inst.sigma;
  if (inst.noise) j["noise"] = vector_to_json(*inst.noise);
  if (embed_dense) {
    const MeasurementEnsemble e = inst.ensemble();
    Json sketches = Json::array();
    Json frames = Json::array();
    for (int i = 0; i < e.components(); ++i) {
      sketches.push_back(matrix_to_json(e.sketch(i)));
      frames.push_back(matrix_to_json(e.frames().vectors(i)));
    }
    j["dense"] = {{"sketches", std::move(sketches)}, {"frames", std::move(frames)}};
  }
  return j;
}

ProblemInstance instance_from_json(const Json& j) {
  ProblemInstance inst;
  for (const auto& b : j.at("profile"))
    inst.profile.push_back({b.at(0).get<Index>(), b.at(1).get<Index>()});
  inst.q = j.at("q").get<Index>();
  inst.frame_kind = j.at("frame").at("kind").get<std::string>();
  inst.frame_seed = j.at("frame").at("seed").get<std::uint64_t>();
  inst.sketch_seed = j.at("sketch_seed").get<std::uint64_t>();
  inst.convention = convention_from_name(j.at("convention").get<std::string>());
  if (j.contains("support")) {
    std::vector<std::vector<Index>> sets;
    for (const auto& s : j.at("support")) sets.push_back(s.get<std::vector<Index>>());
    inst.support = SupportPattern(inst.profile, std::move(sets));
  }
  if (j.contains("planted")) inst.planted = tuple_from_json(j.at("planted"));
  if (j.contains("measurements")) inst.measurements = vector_from_json(j.at("measurements"));
  if (j.contains("sigma")) inst.sigma = j.at("sigma").get<double>();
  if (j.contains("noise")) inst.noise = vector_from_json(j.at("noise"));
  if (j.contains("dense")) {
    std::vector<Matrix> sketches, frames;
    for (const auto& m : j.at("dense").at("sketches")) sketches.push_back(matrix_from_json(m));
    for (const auto& m : j.at("dense").at("frames")) frames.push_back(matrix_from_json(m));
    inst.dense_sketches = std::move(sketches);
    inst.dense_frames = std::move(frames);
  }
  return inst;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Json j;
  in >> j;
  return j;
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace demix
