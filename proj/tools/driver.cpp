#include "driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "mpfs/io.hpp"
#include "mpfs/monolithic.hpp"
#include "mpfs/norms.hpp"

namespace mpfs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

CaseDefinition build_case(const RunConfig& cfg) {
  CaseOptions opt;
  opt.resolution = cfg.resolution;
  opt.mesh_size = cfg.mesh;
  opt.drag_cap = cfg.drag_cap;
  opt.geometric_degree = cfg.geometric_degree;
  auto def = make_case(cfg.case_name, opt);
  if (cfg.velocity_degree > 0) def.velocity_degree = cfg.velocity_degree;
  if (cfg.pressure_degree > 0) def.pressure_degree = cfg.pressure_degree;
  if (cfg.phase_degree > 0) def.phase_degree = cfg.phase_degree;
  if (!cfg.formulation.empty()) def.formulation = formulation_from_string(cfg.formulation);
  return def;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<FieldVector> velocity_fields(const FlowState& s) {
  std::vector<FieldVector> out;
  for (const auto& ph : s.phases) out.push_back(ph.u);
  return out;
}

std::string vtk_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%06d.vtk", step);
  return buf;
}

void write_fields(const fs::path& path, const RunResult& r, const std::vector<FieldVector>& uhat) {
  std::vector<NamedField> fields;
  for (int k = 0; k < static_cast<int>(r.state.phases.size()); ++k) {
    const std::string n = r.def.problem.phases[k].name;
    fields.push_back({"alpha_" + n, r.state.alpha(k)});
    fields.push_back({"u_" + n, r.state.phases[k].u});
    if (k < static_cast<int>(uhat.size())) fields.push_back({"uhat_" + n, uhat[k]});
  }
  fields.push_back({"p", r.state.p});
  write_vtk(path, *r.def.mesh, fields, {}, r.def.name + " t=" + format_double(r.state.t));
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& w) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
    den += w[i] * b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<double> scalar_at_qp(const FieldVector& f, const QuadratureCache& qc) {
  const auto v = eval_scalar(f, qc);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].value;
  return out;
}

}  // namespace

fs::path output_dir(const std::string& name) {
  const char* root = std::getenv("MPFS_OUTPUT_ROOT");
  return (root && *root ? fs::path(root) : fs::current_path()) / name;
}

RunResult simulate(const RunConfig& cfg, const std::optional<fs::path>& out) {
  RunResult r;
  r.def = build_case(cfg);
  r.tau = cfg.tau > 0.0 ? cfg.tau : r.def.tau;
  const double T = cfg.T > 0.0 ? cfg.T : r.def.T;
  r.steps = cfg.steps > 0 ? cfg.steps : static_cast<int>(std::lround(T / r.tau));
  if (r.steps < 1) throw std::invalid_argument("run needs at least one step");
  if (cfg.scheme != "fractional_step" && cfg.scheme != "monolithic")
    throw std::invalid_argument("unknown scheme '" + cfg.scheme + "' (fractional_step, monolithic)");
  const bool mono = cfg.scheme == "monolithic";

  r.disc = std::make_shared<Discretization>(r.def.mesh, r.def.velocity_degree, r.def.pressure_degree,
                                            r.def.phase_degree);
  const auto& d = *r.disc;
  const auto& problem = r.def.problem;
  r.state = make_initial_state(d, r.def.formulation, r.def.alpha0, r.def.u0);

  SchemeConfig scfg;
  scfg.tau = r.tau;
  scfg.transport.formulation = r.def.formulation;
  scfg.transport.chi = cfg.chi;
  scfg.momentum_solver.rel_tol = cfg.tol;
  scfg.pressure_solver.rel_tol = cfg.tol;
  scfg.implicit_viscous = cfg.implicit_viscous;
  // also used by monolithic runs for the energy column
  FractionalStepScheme fsch(d, problem, scfg);
  std::optional<MonolithicScheme> msch;
  if (mono) {
    MonolithicConfig mcfg;
    mcfg.tau = r.tau;
    mcfg.transport = scfg.transport;
    mcfg.solver.rel_tol = cfg.tol;
    msch.emplace(d, problem, mcfg);
  } else if (r.def.exact) {
    const auto& p = r.def.exact->p;
    r.state.p = interpolate(d.pressure(), ScalarFunction([&](const Vec2& x) { return p(x, 0.0); }));
    remove_pressure_mean(d, r.state.p);
  } else {
    r.state.p = fsch.initialize_pressure(r.state);
  }

  std::ofstream ts, lg;
  if (out) {
    fs::create_directories(*out);
    ts.open(*out / "timeseries.csv");
    write_timeseries_header(ts);
    if (!mono) {
      lg.open(*out / "ledger.csv");
      write_ledger_header(lg);
    }
  }

  auto uhat_fields = [&]() {
    if (mono) return velocity_fields(r.state);
    std::vector<FieldVector> u;
    for (int k = 0; k < problem.num_phases(); ++k) u.push_back(fsch.projected_velocity_field(r.state, k));
    return u;
  };
  auto record = [&](double residual, const std::vector<FieldVector>& uhat) {
    TimeseriesRow row;
    row.t = r.state.t;
    row.e_kinetic = kinetic_energy(d, problem, r.state);
    row.e_div = divergence_error(d, r.state, uhat);
    row.partition = partition_error(d, r.state);
    row.alpha_min = alpha_min_nodal(r.state);
    double psi = 0.0;
    for (double v : fsch.psi(r.state)) psi += v;
    row.psi_total = psi;
    row.ineq_residual = residual;
    r.rows.push_back(row);
    if (ts.is_open()) write_timeseries_row(ts, row);
  };

  const double no_residual = mono ? std::nan("") : 0.0;
  {
    const auto uhat = uhat_fields();
    record(no_residual, uhat);
    if (out && cfg.vtk_every > 0) write_fields(*out / vtk_name(0), r, uhat);
  }

  for (int n = 0; n < r.steps; ++n) {
    try {
      double residual = no_residual;
      if (mono) {
        r.state = msch->advance(r.state);
      } else {
        LedgerEntry e;
        r.state = fsch.advance(r.state, &e);
        residual = e.residual();
        r.ledger.push_back(e);
        if (lg.is_open()) write_ledger_row(lg, e);
      }
      const auto uhat = uhat_fields();
      record(residual, uhat);
      const auto& row = r.rows.back();
      if (!std::isfinite(row.e_kinetic) || !std::isfinite(row.e_div) || !std::isfinite(row.partition))
        throw std::runtime_error("non-finite diagnostics at step " + std::to_string(n + 1));
      if (out && cfg.vtk_every > 0 && ((n + 1) % cfg.vtk_every == 0 || n + 1 == r.steps))
        write_fields(*out / vtk_name(n + 1), r, uhat);
      if (!cfg.quiet && ((n + 1) % std::max(1, r.steps / 10) == 0 || n + 1 == r.steps))
        std::cerr << "step " << n + 1 << "/" << r.steps << " t=" << format_double(r.state.t)
                  << " E_kinetic=" << row.e_kinetic << '\n';
    } catch (const std::exception& ex) {
      r.ok = false;
      r.failed_step = n + 1;
      r.error = ex.what();
      break;
    }
  }
  return r;
}

int cmd_run(const RunConfig& cfg, const std::string& out_name) {
  const fs::path dir = output_dir(out_name);
  RunResult r;
  try {
    r = simulate(cfg, dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }

  json js;
  js["case"] = r.def.name;
  js["scheme"] = cfg.scheme;
  js["formulation"] = to_string(r.def.formulation);
  js["degrees"] = {r.def.velocity_degree, r.def.pressure_degree, r.def.phase_degree};
  js["elements"] = r.def.mesh->num_elements();
  js["tau"] = r.tau;
  js["steps"] = r.steps;
  js["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) {
    js["failed_step"] = r.failed_step;
    js["error"] = r.error;
  }
  const auto& last = r.rows.back();
  js["final"] = {{"t", last.t},
                 {"E_kinetic", number(last.e_kinetic)},
                 {"e_div", number(last.e_div)},
                 {"partition", number(last.partition)},
                 {"alpha_min", number(alpha_min_nodal(r.state))},
                 {"alpha_max", number(alpha_max_nodal(r.state))}};
  if (r.ok && r.def.exact) {
    FractionalStepScheme fsch(*r.disc, r.def.problem, {.tau = r.tau});
    std::vector<FieldVector> uhat;
    if (cfg.scheme == "monolithic")
      uhat = velocity_fields(r.state);
    else
      for (int k = 0; k < r.def.problem.num_phases(); ++k) uhat.push_back(fsch.projected_velocity_field(r.state, k));
    const auto e = manufactured_errors(*r.disc, r.state, *r.def.exact, uhat);
    js["errors"] = {{"e_p", e.e_p}, {"e_u", e.e_u}, {"e_div", e.e_div}, {"e_alpha", e.e_alpha}};
  }
  if (!r.ledger.empty()) {
    StabilityLedger ledger(r.def.problem, r.tau);
    for (const auto& e : r.ledger) ledger.add(e);
    const auto rep = ledger_report(ledger);
    js["ledger"] = {{"worst_relative_residual", rep.worst_relative_residual},
                    {"violations", rep.violations},
                    {"gronwall_lhs", rep.bound.lhs},
                    {"gronwall_bound_measured", number(rep.bound.bound_measured)},
                    {"gronwall_bound_cap", number(rep.bound.bound_cap)},
                    {"beta_max", rep.bound.beta_max},
                    {"alpha_min", rep.bound.alpha_min},
                    {"ok", rep.ok()}};
  }
  std::ofstream(dir / "summary.json") << js.dump(2) << '\n';

  if (!r.ok) {
    std::cerr << "run failed at step " << r.failed_step << ": " << r.error << '\n';
    return 2;
  }
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_converge(const RunConfig& cfg, int refinements, const std::string& out_name) {
  if (refinements < 0) {
    std::cerr << "error: refinements must be non-negative\n";
    return 1;
  }
  std::vector<double> taus;
  std::map<std::string, std::vector<double>> err;
  const char* keys[] = {"e_p", "e_u", "e_div", "e_alpha"};
  for (int i = 0; i <= refinements; ++i) {
    RunConfig c = cfg;
    RunResult r;
    try {
      const auto def = build_case(c);
      if (!def.exact) throw std::invalid_argument("case '" + def.name + "' has no exact solution");
      c.tau = (cfg.tau > 0.0 ? cfg.tau : def.tau) / std::pow(2.0, i);
      if (cfg.steps > 0) c.steps = cfg.steps << i;
      c.quiet = true;
      r = simulate(c, std::nullopt);
    } catch (const std::exception& ex) {
      std::cerr << "error: " << ex.what() << '\n';
      return 1;
    }
    if (!r.ok) {
      std::cerr << "run with tau=" << format_double(c.tau) << " failed at step " << r.failed_step << ": " << r.error
                << '\n';
      return 2;
    }
    std::vector<FieldVector> uhat;
    if (cfg.scheme == "monolithic") {
      uhat = velocity_fields(r.state);
    } else {
      FractionalStepScheme fsch(*r.disc, r.def.problem, {.tau = r.tau});
      for (int k = 0; k < r.def.problem.num_phases(); ++k) uhat.push_back(fsch.projected_velocity_field(r.state, k));
    }
    const auto e = manufactured_errors(*r.disc, r.state, *r.def.exact, uhat);
    taus.push_back(r.tau);
    err["e_p"].push_back(e.e_p);
    err["e_u"].push_back(e.e_u);
    err["e_div"].push_back(e.e_div);
    err["e_alpha"].push_back(e.e_alpha);
  }

  const fs::path dir = output_dir(out_name);
  fs::create_directories(dir);
  std::ofstream csv(dir / "convergence.csv");
  csv << "tau,e_p,e_u,e_div,e_alpha\n";
  std::printf("%-12s %-12s %-12s %-12s %-12s\n", "tau", "e_p", "e_u", "e_div", "e_alpha");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    csv << format_double(taus[i]);
    std::printf("%-12.5g", taus[i]);
    for (const char* k : keys) {
      csv << ',' << format_double(err[k][i]);
      std::printf(" %-12.5g", err[k][i]);
    }
    csv << '\n';
    std::printf("\n");
  }
  json js;
  js["tau"] = taus;
  for (const char* k : keys) js["errors"][k] = err[k];
  if (taus.size() >= 2) {
    std::printf("order      ");
    for (const char* k : keys) {
      const double o = fit_order(taus, err[k]);
      js["orders"][k] = number(o);
      std::printf(" %-12.3f", o);
    }
    std::printf("\n");
  } else {
    js["orders"] = nullptr;
  }
  std::ofstream(dir / "convergence.json") << js.dump(2) << '\n';
  return 0;
}

int cmd_compare(const RunConfig& a, const RunConfig& b, const std::vector<double>& stations,
                const std::string& out_name) {
  RunResult ra, rb;
  try {
    const auto da = build_case(a), db = build_case(b);
    const auto& ma = *da.mesh;
    const auto& mb = *db.mesh;
    bool same = da.name == db.name && ma.num_elements() == mb.num_elements() && ma.num_nodes() == mb.num_nodes() &&
                ma.geometric_degree() == mb.geometric_degree() && da.phase_degree == db.phase_degree &&
                da.pressure_degree == db.pressure_degree;
    for (int i = 0; same && i < ma.num_nodes(); ++i) same = norm(ma.nodes()[i] - mb.nodes()[i]) <= 1e-12;
    if (!same) throw std::invalid_argument("the two runs use different meshes or spaces; refusing to compare");
    RunConfig qa = a, qb = b;
    qa.quiet = qb.quiet = true;
    ra = simulate(qa, std::nullopt);
    rb = simulate(qb, std::nullopt);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  for (const auto* r : {&ra, &rb})
    if (!r->ok) {
      std::cerr << "run failed at step " << r->failed_step << ": " << r->error << '\n';
      return 2;
    }
  if (ra.rows.size() != rb.rows.size()) {
    std::cerr << "error: runs have different numbers of steps\n";
    return 1;
  }

  const auto& qc = ra.disc->qc();
  std::vector<double> w(qc.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = qc.jxw(i);
  const double d_alpha = relative_l2(scalar_at_qp(ra.state.alpha(0), qc), scalar_at_qp(rb.state.alpha(0), rb.disc->qc()), w);
  const double d_p = relative_l2(scalar_at_qp(ra.state.p, qc), scalar_at_qp(rb.state.p, rb.disc->qc()), w);
  std::vector<double> ea, eb, one(ra.rows.size(), 1.0);
  for (std::size_t i = 0; i < ra.rows.size(); ++i) {
    ea.push_back(ra.rows[i].e_kinetic);
    eb.push_back(rb.rows[i].e_kinetic);
  }
  const double d_e = relative_l2(ea, eb, one);

  const fs::path dir = output_dir(out_name);
  fs::create_directories(dir);
  json js;
  js["t"] = ra.state.t;
  js["alpha1_rel_l2"] = d_alpha;
  js["p_rel_l2"] = d_p;
  js["E_kinetic_rel_l2"] = d_e;
  std::ofstream(dir / "compare.json") << js.dump(2) << '\n';

  const auto& mesh = *ra.def.mesh;
  const auto aa = sample_at_nodes(ra.state.alpha(0)), ab = sample_at_nodes(rb.state.alpha(0));
  const auto pa = sample_at_nodes(ra.state.p), pb = sample_at_nodes(rb.state.p);
  double xmin = 1e300, xmax = -1e300;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    xmin = std::min(xmin, mesh.nodes()[i].x);
    xmax = std::max(xmax, mesh.nodes()[i].x);
  }
  std::ofstream prof(dir / "profiles.csv");
  prof << "x,y,alpha1_a,alpha1_b,p_a,p_b\n";
  for (double xs : stations) {
    std::vector<int> ids;
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (std::abs(mesh.nodes()[i].x - xs) <= 1e-9 * (xmax - xmin)) ids.push_back(i);
    if (ids.empty()) std::cerr << "warning: no mesh nodes on x=" << format_double(xs) << '\n';
    std::sort(ids.begin(), ids.end(), [&](int i, int j) { return mesh.nodes()[i].y < mesh.nodes()[j].y; });
    for (int i : ids)
      prof << format_double(mesh.nodes()[i].x) << ',' << format_double(mesh.nodes()[i].y) << ',' << format_double(aa[i])
           << ',' << format_double(ab[i]) << ',' << format_double(pa[i]) << ',' << format_double(pb[i]) << '\n';
  }

  std::printf("alpha1 rel L2     %.6e\np rel L2          %.6e\nE_kinetic rel L2  %.6e\n", d_alpha, d_p, d_e);
  return 0;
}

}  // namespace mpfs::cli
