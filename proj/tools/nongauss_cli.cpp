// nongauss: command-line front end.
//
//   nongauss compute --family fock --p 1
//   nongauss compute --state rho.json --delta-prime
//   nongauss figure f3-left --out f3-left.csv
//   nongauss sweep --family ips --param transmissivity --from 0.1 --to 0.9 --step 0.1
//   nongauss state --family cat --alpha 1 --phi 0.4 --out cat.json
//   nongauss map --channel ips --transmissivity 0.9 --efficiency 0.9
//
// Exit codes: 0 success, 2 validation/parse, 3 numeric, 4 I/O.

#include "nongauss/nongauss.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace nongauss;

struct StateOptions {
  std::string family;
  int p = 1, n = 1, d = 1;
  double alpha = 1.0, alpha_im = 0.0, phi = 0.0, r = 0.0, n_t = 0.0;
  std::optional<int> cutoff;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--p", p, "photon number (fock, fock-copies, loss)");
    app.add_option("--n", n, "number of copies (fock-copies)");
    app.add_option("--alpha", alpha, "amplitude (cat, coherent real part)");
    app.add_option("--alpha-im", alpha_im, "coherent imaginary part");
    app.add_option("--phi", phi, "superposition angle (cat, bell-*)");
    app.add_option("--r", r, "squeezing (squeezed-vacuum, ips)");
    app.add_option("--n-t", n_t, "thermal occupation (thermal)");
    app.add_option("--d", d, "maximum photon number (random)");
    app.add_option("--cutoff", cutoff, "Fock cutoff override");
    app.add_option("--seed", seed, "random seed")->capture_default_str();
  }

  CatalogSpec spec() const {
    CatalogSpec s;
    s.family = parse_family(family);
    s.p = p;
    s.n = n;
    s.alpha = alpha;
    s.alpha_im = alpha_im;
    s.phi = phi;
    s.r = r;
    s.n_t = n_t;
    s.d = d;
    s.seed = seed;
    s.cutoff = cutoff;
    return s;
  }

  StateMetadata metadata() const {
    StateMetadata m;
    m.family = family;
    const CatalogSpec s = spec();
    switch (s.family) {
      case Family::fock: m.parameters = {{"p", p}}; break;
      case Family::fock_copies: m.parameters = {{"p", p}, {"n", n}}; break;
      case Family::cat: m.parameters = {{"alpha", alpha}, {"phi", phi}}; break;
      case Family::bell_phi:
      case Family::bell_psi: m.parameters = {{"phi", phi}}; break;
      case Family::squeezed_vacuum: m.parameters = {{"r", r}}; break;
      case Family::coherent: m.parameters = {{"alpha", alpha}, {"alpha_im", alpha_im}}; break;
      case Family::thermal: m.parameters = {{"n_t", n_t}}; break;
      case Family::random:
        m.parameters = {{"d", d}};
        m.seed = seed;
        break;
    }
    return m;
  }
};

struct Output {
  std::string path;
  std::string format = "csv";

  void add_to(CLI::App& app) {
    app.add_option("--out", path, "output file (default: stdout)");
    app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }

  void emit(const Report& r) const {
    const std::string text = render(r, format == "json" ? OutputFormat::json : OutputFormat::csv);
    if (path.empty()) {
      std::cout << text;
    } else {
      write_text_file(path, text);
    }
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Non-Gaussianity of bosonic states in a truncated Fock basis"};
  app.require_subcommand(1);
  int parallelism = 1;
  app.add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);

  // compute
  auto* compute = app.add_subcommand("compute", "delta for a catalog state or a state file");
  StateOptions compute_state;
  std::string state_path;
  bool with_prime = false;
  Output compute_out;
  compute->add_option("--family", compute_state.family, "state family");
  compute->add_option("--state", state_path, "state file (JSON)");
  compute_state.add_to(*compute);
  compute->add_flag("--delta-prime", with_prime, "also minimize over the reference mean (single mode)");
  compute_out.add_to(*compute);

  // figure
  auto* fig = app.add_subcommand("figure", "figure dataset");
  std::string fig_id;
  FigureOptions fig_opt;
  Output fig_out;
  fig->add_option("id", fig_id, "figure id")->required()->check(CLI::IsMember(figure_ids()));
  fig->add_option("--seed", fig_opt.seed, "random seed (f2)")->capture_default_str();
  fig->add_option("--samples", fig_opt.samples, "samples per dimension (f2)")->capture_default_str();
  fig_out.add_to(*fig);

  // sweep
  auto* sw = app.add_subcommand("sweep", "one-parameter sweep");
  StateOptions sweep_state;
  SweepSpec sweep_spec;
  Output sweep_out;
  sw->add_option("--family", sweep_spec.family, "catalog family, loss (input |p>) or ips (input S(r)|0>)")
      ->required();
  sweep_state.add_to(*sw);
  sw->add_option("--eta", sweep_spec.eta, "loss transmissivity")->capture_default_str();
  sw->add_option("--transmissivity", sweep_spec.transmissivity, "IPS beam splitter T")->capture_default_str();
  sw->add_option("--efficiency", sweep_spec.efficiency, "IPS detector efficiency")->capture_default_str();
  sw->add_option("--param", sweep_spec.parameter, "swept parameter name")->required();
  sw->add_option("--from", sweep_spec.from, "first value")->required();
  sw->add_option("--to", sweep_spec.to, "last value")->required();
  sw->add_option("--step", sweep_spec.step, "increment")->required();
  sw->add_option("--samples", sweep_spec.samples, "states per value (random)")->capture_default_str();
  sweep_out.add_to(*sw);

  // state
  auto* st = app.add_subcommand("state", "write a catalog state to a JSON file");
  StateOptions state_state;
  std::string state_out;
  st->add_option("--family", state_state.family, "state family")->required();
  state_state.add_to(*st);
  st->add_option("--out", state_out, "output file")->required();

  // map
  auto* mp = app.add_subcommand("map", "lower bound on the non-Gaussianity of a channel");
  std::string channel = "ips";
  double map_eta = 0.5, map_t = 0.9, map_eps = 0.9;
  SearchBox box;
  Output map_out;
  mp->add_option("--channel", channel, "channel")->check(CLI::IsMember({"identity", "loss", "ips"}))->capture_default_str();
  mp->add_option("--eta", map_eta, "loss transmissivity")->capture_default_str();
  mp->add_option("--transmissivity", map_t, "IPS beam splitter T")->capture_default_str();
  mp->add_option("--efficiency", map_eps, "IPS detector efficiency")->capture_default_str();
  mp->add_option("--alpha-max", box.alpha_max, "search box: largest displacement")->capture_default_str();
  mp->add_option("--r-min", box.r_min, "search box: smallest squeezing")->capture_default_str();
  mp->add_option("--r-max", box.r_max, "search box: largest squeezing")->capture_default_str();
  mp->add_option("--n-t-max", box.n_t_max, "search box: largest thermal occupation")->capture_default_str();
  mp->add_option("--grid", box.grid, "grid points per axis")->capture_default_str();
  map_out.add_to(*mp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::validation);
  }

  if (compute->parsed()) {
    if (compute_state.family.empty() == state_path.empty()) {
      throw Error(ErrorKind::validation, "compute needs exactly one of --family or --state");
    }
    const FockState rho = state_path.empty() ? make_state(compute_state.spec()) : load_state(state_path).state;
    const auto result = non_gaussianity(rho);
    Report report = compute_report(rho, result);
    if (with_prime) {
      const auto dp = delta_prime(rho);
      Table& t = report.tables.front();
      t.columns.insert(t.columns.end(), {"delta_prime", "c_re", "c_im"});
      t.rows.front().insert(t.rows.front().end(), {dp.delta_prime, dp.c.real(), dp.c.imag()});
    }
    compute_out.emit(report);
  } else if (fig->parsed()) {
    fig_opt.parallelism = parallelism;
    fig_out.emit(figure(fig_id, fig_opt));
  } else if (sw->parsed()) {
    if (sweep_spec.family != "loss" && sweep_spec.family != "ips") sweep_state.family = sweep_spec.family;
    else sweep_state.family = "fock";
    sweep_spec.base = sweep_state.spec();
    sweep_spec.parallelism = parallelism;
    sweep_out.emit(sweep(sweep_spec));
  } else if (st->parsed()) {
    save_state(state_out, make_state(state_state.spec()), state_state.metadata());
  } else if (mp->parsed()) {
    ChannelParams ch;
    if (channel == "loss") ch = ChannelParams::loss(map_eta);
    else if (channel == "ips") ch = ChannelParams::ips(map_t, map_eps);
    const auto res = map_non_gaussianity(ch, box, parallelism);
    Table t{"map", {"channel", "delta_lower_bound", "alpha", "r", "n_t", "evaluations", "skipped", "flags"}, {}};
    t.add_row({channel, res.delta, res.alpha, res.r, res.n_t, static_cast<long long>(res.evaluations),
               static_cast<long long>(res.skipped), res.flags.to_string()});
    map_out.emit({{}, {t}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const nongauss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nongauss::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
