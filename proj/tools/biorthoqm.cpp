// Command-line frontend: every subcommand prints a deterministic report
// (JSON by default, CSV on request) assembled from the library calls.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biortho/biortho.hpp"

namespace {

using namespace biortho;

struct CommonOpts {
  std::string input;
  std::string left;
  std::string state;
  std::string obs;
  std::string output;
  std::string format = "json";
  std::optional<double> gamma;
  std::optional<double> beta;
  std::optional<double> time;
  std::optional<double> epsilon;
  std::optional<double> theta;
  std::optional<double> phi;
  std::optional<double> tol;
  int mode = 0;
  std::string command_echo;
  std::vector<std::string> digest_parts;
};

Matrix sx_igz(double gamma) {
  return Matrix(2, {cplx(0, -gamma), 1.0, 1.0, cplx(0, gamma)});
}

void add_io_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output", o.output, "Write the report to this path instead of stdout");
  cmd->add_option("--tol", o.tol, "Override the eigensolver residual tolerance");
}

Tolerances tolerances_from(const CommonOpts& o) {
  Tolerances t;
  if (o.tol) t.eig_tol = *o.tol;
  return t;
}

Matrix load_input(CommonOpts& o, std::string* label = nullptr) {
  if (!o.input.empty()) {
    const std::string text = io::read_file(o.input);
    o.digest_parts.push_back(text);
    const MatrixFile mf = io::parse_matrix(io::parse_json_text(text, o.input), o.input);
    if (label) *label = mf.label;
    return mf.matrix;
  }
  if (o.gamma) {
    o.digest_parts.push_back("sx-igz:" + io::format_number(*o.gamma));
    return sx_igz(*o.gamma);
  }
  throw ParseError("no input: pass --input FILE or --gamma X for the built-in family");
}

Matrix load_left(CommonOpts& o) {
  if (o.left.empty()) throw ParseError("this command needs --left FILE");
  const std::string text = io::read_file(o.left);
  o.digest_parts.push_back(text);
  return io::parse_matrix(io::parse_json_text(text, o.left), o.left).matrix;
}

StateVector load_state(CommonOpts& o, const BiorthogonalSystem& sys) {
  if (!o.state.empty()) {
    const std::string text = io::read_file(o.state);
    o.digest_parts.push_back(text);
    const StateFile sf = io::parse_state(io::parse_json_text(text, o.state), o.state);
    if (static_cast<int>(sf.coeffs.size()) != sys.dim())
      throw ParseError(o.state + ": state dimension does not match the system");
    if (sf.basis == StateBasis::ambient) return components(sys, sf.coeffs);
    return state_from_coeffs(sys, sf.coeffs);
  }
  if (o.theta) {
    o.digest_parts.push_back("bloch:" + io::format_number(*o.theta) + "," +
                             io::format_number(o.phi.value_or(0.0)));
    return bloch_state(sys, *o.theta, o.phi.value_or(0.0));
  }
  throw ParseError("no state: pass --state FILE or --theta/--phi angles");
}

void emit(const CommonOpts& o, const std::string& body) {
  if (o.output.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw ParseError(o.output + ": cannot open for writing");
  out << body;
}

std::string digest(const CommonOpts& o) {
  std::uint64_t h = io::fnv1a64("");
  for (const auto& part : o.digest_parts) {
    h = io::fnv1a64(part, h);
    h = io::fnv1a64("\x1f", h);
  }
  return io::hex64(h);
}

void report_envelope(io::JsonWriter& w, const std::string& command, const CommonOpts& o) {
  const Tolerances t = tolerances_from(o);
  w.key("command").value(o.command_echo.empty() ? command : o.command_echo);
  w.key("inputs_digest").value(digest(o));
  w.key("version").value(kVersion);
  w.key("tolerances").begin_object();
  w.key("eig_tol").value(t.eig_tol);
  w.key("inv_tol").value(t.inv_tol);
  w.key("pair_tol").value(t.pair_tol);
  w.key("deg_tol").value(t.deg_tol);
  w.key("ep_tol").value(t.ep_tol);
  w.key("sym_tol").value(t.sym_tol);
  w.key("system_tol").value(t.system_tol);
  w.key("reality_tol").value(t.reality_tol);
  w.end_object();
}

std::string csv_head(const std::string& command, const CommonOpts& o) {
  return "# command," + (o.command_echo.empty() ? command : o.command_echo) +
         "\n# inputs_digest," + digest(o) + "\n# version," + std::string(kVersion) + "\n";
}

// ---- subcommand payloads ----------------------------------------------

int run_eigsys(CommonOpts& o) {
  std::string label;
  const Matrix k = load_input(o, &label);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  std::vector<double> pf(sys.dim());
  for (int n = 0; n < sys.dim(); ++n) pf[n] = petermann_factor(sys, n);

  if (o.format == "csv") {
    std::string body = csv_head("eigsys", o);
    body += "mode,re_kappa,im_kappa,petermann\n";
    for (int n = 0; n < sys.dim(); ++n)
      body += std::to_string(n) + "," + io::format_number(sys.kappa()[n].real()) + "," +
              io::format_number(sys.kappa()[n].imag()) + "," + io::format_number(pf[n]) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "eigsys", o);
  w.key("payload").begin_object();
  w.key("dim").value(sys.dim());
  if (!label.empty()) w.key("label").value(label);
  w.key("kappa").begin_array();
  for (const auto& z : sys.kappa()) w.value(z);
  w.end_array();
  w.key("phi").value(sys.frame()->phi);
  w.key("chi").value(sys.frame()->chi);
  w.key("gauge").value(sys.gauge() == Gauge::c_norm ? "c_norm" : "balanced");
  w.key("biortho_defect").value(sys.biortho_defect());
  w.key("spectrum_real").value(sys.spectrum_real());
  w.key("petermann").begin_array();
  for (double v : pf) w.value(v);
  w.end_array();
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

int run_probs(CommonOpts& o) {
  const Matrix k = load_input(o);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  const StateVector psi = load_state(o, sys);
  const auto p = transition_probs(psi);

  if (o.format == "csv") {
    std::string body = csv_head("probs", o) + "mode,probability\n";
    for (size_t n = 0; n < p.size(); ++n)
      body += std::to_string(n) + "," + io::format_number(p[n]) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "probs", o);
  w.key("payload").begin_object();
  w.key("probabilities").begin_array();
  for (double v : p) w.value(v);
  w.end_array();
  w.key("biortho_norm").value(psi.norm2());
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

int run_expect(CommonOpts& o) {
  const Matrix k = load_input(o);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  const StateVector psi = load_state(o, sys);
  std::optional<Matrix> custom;
  if (!o.obs.empty()) {
    const std::string text = io::read_file(o.obs);
    o.digest_parts.push_back(text);
    custom = io::parse_matrix(io::parse_json_text(text, o.obs), o.obs).matrix;
  } else if (sys.dim() != 2) {
    throw ParseError("expect without --obs uses the deformed Pauli triple; system must be 2x2");
  }

  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "expect", o);
  w.key("payload").begin_object();
  std::string csv = csv_head("expect", o) + "observable,re,im\n";
  if (custom) {
    const Observable obs = observable_from_coeffs(sys, *custom);
    const cplx v = expectation_pure(obs, psi);
    w.key("expectation").value(v);
    w.key("biortho_hermitian").value(is_biortho_hermitian(obs));
    csv += "custom," + io::format_number(v.real()) + "," + io::format_number(v.imag()) + "\n";
  } else {
    const auto pauli = deformed_pauli(sys);
    const char* names[3] = {"sigma_x", "sigma_y", "sigma_z"};
    for (int i = 0; i < 3; ++i) {
      const cplx v = expectation_pure(pauli[i], psi);
      w.key(names[i]).value(v);
      csv += std::string(names[i]) + "," + io::format_number(v.real()) + "," +
             io::format_number(v.imag()) + "\n";
    }
  }
  w.end_object();
  w.end_object();
  emit(o, o.format == "csv" ? csv : w.str() + "\n");
  return 0;
}

int run_evolve(CommonOpts& o) {
  if (!o.time) throw ParseError("evolve needs --time T");
  const Matrix k = load_input(o);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  const StateVector psi0 = load_state(o, sys);
  const StateVector psit = evolve(sys, psi0, *o.time);
  const auto analysis = decay_analysis(sys, psi0);

  if (o.format == "csv") {
    std::string body = csv_head("evolve", o) + "mode,re_coeff,im_coeff,rate\n";
    for (int n = 0; n < sys.dim(); ++n)
      body += std::to_string(n) + "," + io::format_number(psit.coeffs()[n].real()) + "," +
              io::format_number(psit.coeffs()[n].imag()) + "," +
              io::format_number(analysis.rates[n]) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "evolve", o);
  w.key("payload").begin_object();
  w.key("time").value(*o.time);
  w.key("coeffs").value(psit.coeffs());
  w.key("biortho_norm").value(psit.norm2());
  w.key("dominant_mode").value(analysis.dominant_mode);
  w.key("rates").begin_array();
  for (double r : analysis.rates) w.value(r);
  w.end_array();
  w.key("half_life").value(analysis.half_life);
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

int run_thermal(CommonOpts& o) {
  if (!o.beta) throw ParseError("thermal needs --beta B");
  const Matrix k = load_input(o);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  const DensityMatrix rho = thermal_state(sys, *o.beta);
  const double z = partition_function(sys, *o.beta);
  Matrix kappa_diag(sys.dim());
  for (int n = 0; n < sys.dim(); ++n) kappa_diag(n, n) = sys.kappa()[n].real();
  const cplx energy = expectation_mixed(observable_from_coeffs(sys, kappa_diag), rho);
  const double entropy = von_neumann_entropy(rho);

  if (o.format == "csv") {
    std::string body = csv_head("thermal", o) + "mode,weight\n";
    for (int n = 0; n < sys.dim(); ++n)
      body += std::to_string(n) + "," + io::format_number(rho.coeffs()(n, n).real()) + "\n";
    body += "entropy," + io::format_number(entropy) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "thermal", o);
  w.key("payload").begin_object();
  w.key("beta").value(*o.beta);
  w.key("weights").begin_array();
  for (int n = 0; n < sys.dim(); ++n) w.value(rho.coeffs()(n, n).real());
  w.end_array();
  w.key("partition_function").value(z);
  w.key("energy").value(energy);
  w.key("entropy").value(entropy);
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

int run_perturb(CommonOpts& o) {
  const Matrix k = load_input(o);
  const Matrix kprime = load_left(o);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  const FirstOrderResult fo = first_order(sys, kprime, o.mode);

  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "perturb", o);
  w.key("payload").begin_object();
  w.key("mode").value(fo.mode);
  w.key("mu1").value(fo.mu1);
  w.key("psi1_coeffs").value(fo.psi1_coeffs);
  w.key("epsilon_validity").value(fo.epsilon_validity);
  std::string csv = csv_head("perturb", o);
  csv += "mu1_re," + io::format_number(fo.mu1.real()) + "\n";
  csv += "mu1_im," + io::format_number(fo.mu1.imag()) + "\n";
  csv += "epsilon_validity," + io::format_number(fo.epsilon_validity) + "\n";
  if (o.epsilon) {
    const double order = richardson_validate(k, kprime, o.mode, *o.epsilon, tolerances_from(o));
    w.key("epsilon").value(*o.epsilon);
    if (std::isnan(order))
      w.key("richardson_order").value("exact");
    else
      w.key("richardson_order").value(order);
    csv += "richardson_order," + (std::isnan(order) ? "exact" : io::format_number(order)) + "\n";
  }
  w.end_object();
  w.end_object();
  emit(o, o.format == "csv" ? csv : w.str() + "\n");
  return 0;
}

int run_compose(CommonOpts& o) {
  const Matrix ka = load_input(o);
  const Matrix kb = load_left(o);
  const Tolerances t = tolerances_from(o);
  const BiorthogonalSystem a = build_system(ka, t);
  const BiorthogonalSystem b = build_system(kb, t);
  const CompositeSystem comp = tensor_systems(a, b);

  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "compose", o);
  w.key("payload").begin_object();
  w.key("dim_a").value(a.dim());
  w.key("dim_b").value(b.dim());
  w.key("dim").value(comp.dim());
  w.key("biortho_defect").value(comp.biortho_defect());
  std::string csv = csv_head("compose", o);
  csv += "dim," + std::to_string(comp.dim()) + "\n";
  csv += "biortho_defect," + io::format_number(comp.biortho_defect()) + "\n";
  if (a.dim() == 2 && b.dim() == 2) {
    const Observable ising =
        tensor_observable(comp, deformed_pauli(a)[2], deformed_pauli(b)[2]);
    const RawSpectrum spec = eig_general(ising.ambient(), t.eig_tol);
    w.key("ising_eigenvalues").begin_array();
    for (const auto& z : spec.eigenvalues) w.value(z);
    w.end_array();
    const StateVector s = singlet(comp);
    w.key("singlet_ising_correlation").value(expectation_pure(ising, s));
    for (size_t i = 0; i < spec.eigenvalues.size(); ++i)
      csv += "ising_eig_" + std::to_string(i) + "," +
             io::format_number(spec.eigenvalues[i].real()) + "\n";
  }
  w.end_object();
  w.end_object();
  emit(o, o.format == "csv" ? csv : w.str() + "\n");
  return 0;
}

int run_ptcheck(CommonOpts& o) {
  const Matrix k = load_input(o);
  const Matrix p = parity_operator(k.dim());
  const PtCheck chk = pt_check(k, p);

  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "ptcheck", o);
  w.key("payload").begin_object();
  w.key("pt_defect").value(chk.defect);
  w.key("is_pt_symmetric").value(chk.is_pt_symmetric);
  std::string classification = "exceptional";
  std::string csv = csv_head("ptcheck", o);
  try {
    const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
    const auto modes = pt_eigenstate_check(sys, p);
    bool all_modes = true;
    w.key("eigenstate_pt").begin_array();
    for (bool m : modes) {
      w.value(m);
      all_modes = all_modes && m;
    }
    w.end_array();
    w.key("spectrum_real").value(sys.spectrum_real());
    classification = (chk.is_pt_symmetric && all_modes && sys.spectrum_real()) ? "unbroken"
                                                                               : "broken";
  } catch (const Error& e) {
    w.key("build_error").value(e.what());
  }
  w.key("classification").value(classification);
  w.end_object();
  w.end_object();
  csv += "pt_defect," + io::format_number(chk.defect) + "\nclassification," + classification + "\n";
  emit(o, o.format == "csv" ? csv : w.str() + "\n");
  return 0;
}

int run_metric(CommonOpts& o) {
  const Matrix k = load_input(o);
  const BiorthogonalSystem sys = build_system(k, tolerances_from(o));
  const MetricOperator met = metric_from_eigs(sys);

  // Dual-path check against the biorthogonal expectation on basis states
  // and a fixed probe state.
  const Observable kobs = observable_from_ambient(sys, k);
  double max_disc = 0;
  std::vector<Vector> probes;
  for (int n = 0; n < sys.dim(); ++n) {
    Vector e(sys.dim(), cplx{});
    e[n] = 1.0;
    probes.push_back(e);
  }
  Vector mix(sys.dim());
  for (int n = 0; n < sys.dim(); ++n) mix[n] = cplx(1.0 + 0.1 * n, 0.2 - 0.05 * n);
  probes.push_back(mix);
  for (const auto& amb : probes) {
    const StateVector s = components(sys, amb);
    max_disc = std::max(max_disc,
                        std::abs(metric_expectation(met, k, amb) - expectation_pure(kobs, s)));
  }

  if (o.format == "csv") {
    std::string body = csv_head("metric", o);
    body += "condition_number," + io::format_number(met.condition_number) + "\n";
    body += "involution_defect," + io::format_number(met.involution_defect) + "\n";
    body += "antilinear_involution_defect," +
            io::format_number(met.antilinear_involution_defect) + "\n";
    body += "dual_path_max_discrepancy," + io::format_number(max_disc) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "metric", o);
  w.key("payload").begin_object();
  w.key("g").value(met.g);
  w.key("condition_number").value(met.condition_number);
  w.key("involution_defect").value(met.involution_defect);
  w.key("antilinear_involution_defect").value(met.antilinear_involution_defect);
  w.key("dual_path_max_discrepancy").value(max_disc);
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

int run_sweep(CommonOpts& o, const std::string& family, double gmin, double gmax, int steps) {
  if (family != "sx-igz") throw ParseError("unknown family: " + family);
  if (steps < 2) throw ParseError("sweep needs --steps >= 2");
  o.digest_parts.push_back("sweep:" + family + ":" + io::format_number(gmin) + ":" +
                           io::format_number(gmax) + ":" + std::to_string(steps));
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) grid[i] = gmin + (gmax - gmin) * i / (steps - 1);
  const PhaseScanReport rep = phase_scan(sx_igz, grid, tolerances_from(o));

  if (o.format == "csv") {
    std::string body = csv_head("sweep", o) + "gamma,phase,max_im_kappa,min_overlap\n";
    for (size_t i = 0; i < grid.size(); ++i)
      body += io::format_number(rep.parameter[i]) + "," + phase_name(rep.phase[i]) + "," +
              io::format_number(rep.max_im_kappa[i]) + "," +
              io::format_number(rep.min_overlap[i]) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "sweep", o);
  w.key("payload").begin_object();
  w.key("family").value(family);
  w.key("points").begin_array();
  for (size_t i = 0; i < grid.size(); ++i) {
    w.begin_object();
    w.key("gamma").value(rep.parameter[i]);
    w.key("phase").value(phase_name(rep.phase[i]));
    w.key("max_im_kappa").value(rep.max_im_kappa[i]);
    w.key("min_overlap").value(rep.min_overlap[i]);
    if (!rep.note[i].empty()) w.key("note").value(rep.note[i]);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

int run_young(CommonOpts& o, int n) {
  if (n < 3) throw ParseError("young needs N >= 3");
  o.digest_parts.push_back("young:" + std::to_string(n));
  // Truncated pair phi_k = e_1 + e_k, chi_k = e_k for k = 2..N. Each chi has a
  // single nonzero component, so every inner product reduces to one lookup.
  const int modes = n - 1;
  double defect = 0;
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j) {
      const int ambient_row = i + 1;           // support of chi_i
      const double phi_j_entry = (ambient_row == j + 1) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(phi_j_entry - (i == j ? 1.0 : 0.0)));
    }
  const double c = 1.0 / modes;
  double biortho_norm = 0;
  for (int i = 0; i < modes; ++i) biortho_norm += c * c;
  // Ambient image of the uniform state: e_1 + (1/(N-1)) sum_k e_k.
  double amb2 = 1.0;
  for (int i = 0; i < modes; ++i) amb2 += c * c;

  if (o.format == "csv") {
    std::string body = csv_head("young", o);
    body += "n," + std::to_string(n) + "\n";
    body += "modes," + std::to_string(modes) + "\n";
    body += "biortho_defect," + io::format_number(defect) + "\n";
    body += "uniform_biortho_norm," + io::format_number(biortho_norm) + "\n";
    body += "uniform_ambient_norm," + io::format_number(std::sqrt(amb2)) + "\n";
    emit(o, body);
    return 0;
  }
  io::JsonWriter w;
  w.begin_object();
  report_envelope(w, "young", o);
  w.key("payload").begin_object();
  w.key("n").value(n);
  w.key("modes").value(modes);
  w.key("biortho_defect").value(defect);
  w.key("uniform_biortho_norm").value(biortho_norm);
  w.key("uniform_ambient_norm").value(std::sqrt(amb2));
  w.end_object();
  w.end_object();
  emit(o, w.str() + "\n");
  return 0;
}

void print_error(const std::string& msg) {
  const bool color = isatty(fileno(stderr)) && std::getenv("NO_COLOR") == nullptr;
  if (color)
    std::fprintf(stderr, "\x1b[31merror:\x1b[0m %s\n", msg.c_str());
  else
    std::fprintf(stderr, "error: %s\n", msg.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biorthogonal quantum mechanics toolkit"};
  app.require_subcommand(1);
  CommonOpts o;

  for (int i = 1; i < argc; ++i) {
    if (i > 1) o.command_echo += ' ';
    o.command_echo += argv[i];
  }

  auto add_matrix_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "Matrix file (JSON)");
    cmd->add_option("--gamma", o.gamma, "Built-in family sx-igz at this gamma");
  };
  auto add_state_input = [&](CLI::App* cmd) {
    cmd->add_option("--state", o.state, "State file (JSON)");
    cmd->add_option("--theta", o.theta, "Polar angle of a two-level state");
    cmd->add_option("--phi", o.phi, "Azimuthal angle of a two-level state");
  };

  CLI::App* eigsys = app.add_subcommand("eigsys", "Eigenvalues and the gauged eigenbasis");
  add_matrix_input(eigsys);
  add_io_flags(eigsys, o);

  CLI::App* probs = app.add_subcommand("probs", "Transition probabilities of a state");
  add_matrix_input(probs);
  add_state_input(probs);
  add_io_flags(probs, o);

  CLI::App* expect = app.add_subcommand("expect", "Observable expectation values");
  add_matrix_input(expect);
  add_state_input(expect);
  expect->add_option("--obs", o.obs, "Observable coefficient matrix file");
  add_io_flags(expect, o);

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "Evolve a state for a given time");
  add_matrix_input(evolve_cmd);
  add_state_input(evolve_cmd);
  evolve_cmd->add_option("--time", o.time, "Evolution time");
  add_io_flags(evolve_cmd, o);

  CLI::App* thermal = app.add_subcommand("thermal", "Thermal state at inverse temperature beta");
  add_matrix_input(thermal);
  thermal->add_option("--beta", o.beta, "Inverse temperature");
  add_io_flags(thermal, o);

  CLI::App* perturb = app.add_subcommand("perturb", "First-order perturbation analysis");
  add_matrix_input(perturb);
  perturb->add_option("--left", o.left, "Perturbation matrix file");
  perturb->add_option("--mode", o.mode, "Mode index");
  perturb->add_option("--epsilon", o.epsilon, "Probe size for the order estimate");
  add_io_flags(perturb, o);

  CLI::App* compose = app.add_subcommand("compose", "Tensor product of two systems");
  add_matrix_input(compose);
  compose->add_option("--left", o.left, "Second factor matrix file");
  add_io_flags(compose, o);

  CLI::App* ptcheck = app.add_subcommand("ptcheck", "Parity-time symmetry analysis");
  add_matrix_input(ptcheck);
  add_io_flags(ptcheck, o);

  CLI::App* metric = app.add_subcommand("metric", "Metric operator from the eigenbasis");
  add_matrix_input(metric);
  add_io_flags(metric, o);

  std::string family = "sx-igz";
  double gmin = 0, gmax = 2;
  int steps = 41;
  CLI::App* sweep = app.add_subcommand("sweep", "Phase scan over a parameterized family");
  sweep->add_option("--family", family, "Family name (sx-igz)");
  sweep->add_option("--gamma-min", gmin, "Scan start");
  sweep->add_option("--gamma-max", gmax, "Scan end");
  sweep->add_option("--steps", steps, "Grid size");
  add_io_flags(sweep, o);

  int young_n = 0;
  CLI::App* young = app.add_subcommand("young", "Finite truncation of the Young construction");
  young->add_option("--n", young_n, "Truncation size N (>= 3)")->required();
  add_io_flags(young, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(eigsys)) return run_eigsys(o);
    if (app.got_subcommand(probs)) return run_probs(o);
    if (app.got_subcommand(expect)) return run_expect(o);
    if (app.got_subcommand(evolve_cmd)) return run_evolve(o);
    if (app.got_subcommand(thermal)) return run_thermal(o);
    if (app.got_subcommand(perturb)) return run_perturb(o);
    if (app.got_subcommand(compose)) return run_compose(o);
    if (app.got_subcommand(ptcheck)) return run_ptcheck(o);
    if (app.got_subcommand(metric)) return run_metric(o);
    if (app.got_subcommand(sweep)) return run_sweep(o, family, gmin, gmax, steps);
    if (app.got_subcommand(young)) return run_young(o, young_n);
  } catch (const ParseError& e) {
    print_error(e.what());
    return 1;
  } catch (const Error& e) {
    print_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error(e.what());
    return 2;
  }
  return 1;
}
