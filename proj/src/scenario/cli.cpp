#include "mgres/scenario/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <future>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mgres/grid/io.hpp"
#include "mgres/grid/synth.hpp"
#include "mgres/grid/validate.hpp"
#include "mgres/scenario/outputs.hpp"
#include "mgres/scenario/scenario.hpp"
#include "mgres/util/errors.hpp"
#include "mgres/util/io.hpp"

namespace mgres::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Global {
    std::optional<std::uint64_t> seed;
    std::optional<int> poly_sides;
    std::optional<double> feas_tol;
    std::string out = "out";
};

// Raised for a plan that cannot be built at all.
struct PlanInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

Overrides overrides(const Global& g) { return {g.seed, g.poly_sides, g.feas_tol}; }

void finish(OutputSet& outs, const std::string& command, const Scenario* sc, std::vector<std::string> extra_inputs,
            std::uint64_t seed, Clock::time_point t0) {
    ManifestInfo info;
    info.command = command;
    info.seed = seed;
    if (sc) info.inputs = sc->inputs;
    for (auto& p : extra_inputs) info.inputs.push_back(std::move(p));
    info.outputs = outs.write_all();
    info.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    OutputSet man(outs.dir());
    man.add_json("manifest.json", manifest_json(info));
    man.write_all();
}

// Identifies everything the robust plan depends on.
std::string plan_key(const Scenario& sc) {
    std::string s;
    for (const auto& p : sc.inputs) s += sha256_file(p) + "\n";
    s += "poly_sides=" + std::to_string(sc.options.base.flow.poly_sides) + "\n";
    s += "feas_tol=" + fmt_exact(sc.options.base.solver.feas_tol) + "\n";
    if (sc.initial_soc.random) s += "seed=" + std::to_string(sc.seed) + "\n";
    return sha256_hex(s);
}

std::string certificate_text(const std::vector<std::string>& rows) {
    std::string s;
    for (std::size_t i = 0; i < std::min<std::size_t>(rows.size(), 8); ++i) s += (i ? ", " : "") + rows[i];
    if (rows.size() > 8) s += ", ...";
    return s;
}

robust::RobustResult robust_plan(const Scenario& sc) {
    auto r = robust::solve_robust(sc.model, sc.costs, sc.reserve_costs, sc.box(), sc.options);
    if (!r.optimal())
        throw PlanInfeasible("robust dispatch is " + std::string(lp::to_string(r.dispatch.status)) +
                             " (certificate rows: " + certificate_text(r.dispatch.certificate) + ")");
    return r;
}

void add_dispatch_files(OutputSet& o, const grid::NetworkModel& m, const dispatch::DispatchResult& r) {
    o.add("aggregate.csv", aggregate_csv(m, r));
    o.add("schedule.csv", schedule_csv(m, r));
    o.add("voltage.csv", voltage_csv(m, r));
    o.add("soc.csv", soc_csv(m, r));
}

int cmd_baseline(const std::string& path, const Global& g, std::ostream& out, std::ostream& err) {
    const auto t0 = Clock::now();
    const auto sc = load_scenario(path, overrides(g));
    const auto r = dispatch::solve_baseline(sc.model, sc.costs, sc.options.base);
    OutputSet o(g.out);
    o.add_json("dispatch.json", dispatch_json(sc.model, r));
    if (r.optimal()) add_dispatch_files(o, sc.model, r);
    finish(o, "baseline", &sc, {}, sc.seed, t0);
    if (!r.optimal()) {
        err << "baseline: " << lp::to_string(r.status) << " (certificate rows: " << certificate_text(r.certificate)
            << ")\n";
        return kInfeasible;
    }
    out << "baseline: optimal, objective " << fmt(r.objective) << "\n";
    return kOk;
}

int cmd_robust(const std::string& path, const Global& g, std::ostream& out, std::ostream& err) {
    const auto t0 = Clock::now();
    const auto sc = load_scenario(path, overrides(g));
    const auto r = robust::solve_robust(sc.model, sc.costs, sc.reserve_costs, sc.box(), sc.options);
    OutputSet o(g.out);
    o.add_json("robust.json", robust_json(sc.model, r));
    if (r.optimal()) {
        add_dispatch_files(o, sc.model, r.dispatch);
        o.add("reserves.csv", reserves_csv(sc.model, r));
    }
    finish(o, "robust", &sc, {}, sc.seed, t0);
    if (!r.optimal()) {
        err << "robust: " << lp::to_string(r.dispatch.status)
            << " (certificate rows: " << certificate_text(r.dispatch.certificate) << ")\n";
        return kInfeasible;
    }
    out << "robust: optimal, objective " << fmt(r.objective) << " (energy " << fmt(r.energy_objective)
        << ", reserves " << fmt(r.reserve_objective) << ")\n";
    return kOk;
}

int cmd_advset(const std::string& path, const std::vector<int>& project, const Global& g, std::ostream& out) {
    const auto t0 = Clock::now();
    const auto sc = load_scenario(path, overrides(g));
    if (sc.axes.empty()) throw InputError("scenario.axes", "advset needs at least one axis");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (!project.empty()) {
        if (project.size() < 2) throw InputError("--project", "needs at least two axis indices");
        for (int i : project)
            if (i < 0 || i >= static_cast<int>(sc.axes.size()))
                throw InputError("--project", "axis index " + std::to_string(i) + " out of range");
        for (std::size_t a = 0; a < project.size(); ++a)
            for (std::size_t b = a + 1; b < project.size(); ++b) pairs.emplace_back(project[a], project[b]);
    }
    const auto plan = robust_plan(sc);
    const auto poly = advset::characterize(sc.model, plan, sc.axes, sc.axis_caps(), sc.adv_options());
    OutputSet o(g.out);
    o.add_json("polytope.json", polytope_json(poly, plan_key(sc)));
    o.add("vertices.csv", vertices_csv(poly));
    if (!pairs.empty()) o.add("polygon.csv", polygon_csv(poly, pairs));
    finish(o, "advset", &sc, {}, sc.seed, t0);
    for (std::size_t i = 0; i < poly.dim(); ++i)
        out << "advset: " << poly.axes[i].label() << " alpha " << fmt(poly.alpha_w[i]) << " W"
            << (poly.certified[i] ? "" : " (not certified)") << "\n";
    return kOk;
}

std::vector<sim::Trajectory> simulate_all(const Scenario& sc, const robust::RobustResult& plan,
                                          const std::vector<sim::EventTimeline>& tls) {
    sim::SimOptions so;
    so.tol = sc.sim_tol;
    std::vector<sim::Trajectory> res(tls.size());
    const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t b = 0; b < tls.size(); b += batch) {
        std::vector<std::future<sim::Trajectory>> fut;
        const std::size_t e = std::min(tls.size(), b + batch);
        for (std::size_t i = b; i < e; ++i)
            fut.push_back(std::async(std::launch::async, [&, i] { return sim::run_simulation(sc.model, plan, tls[i], so); }));
        for (std::size_t i = b; i < e; ++i) res[i] = fut[i - b].get();
    }
    return res;
}

int cmd_simulate(const std::string& path, std::optional<int> nsample, std::string poly_path, const Global& g,
                 std::ostream& out) {
    const auto t0 = Clock::now();
    const auto sc = load_scenario(path, overrides(g));
    OutputSet o(g.out);
    if (!nsample) {
        const auto plan = robust_plan(sc);
        auto tr = simulate_all(sc, plan, {sc.timeline}).front();
        const auto rep = sim::violation_report(tr);
        o.add("trajectory.csv", trajectory_csv(sc.model, tr));
        o.add("violations.csv", violations_csv(sc.model, tr));
        o.add_json("summary.json", summary_json(rep));
        finish(o, "simulate", &sc, {}, sc.seed, t0);
        out << "simulate: " << rep.total() << " violation(s)\n";
        return kOk;
    }
    if (*nsample < 1) throw InputError("--sample", "must be >= 1");
    if (poly_path.empty()) poly_path = (fs::path(g.out) / "polytope.json").string();
    const auto pj = parse_json_file(poly_path);
    const auto poly = polytope_from_json(pj, poly_path);
    const auto plan = robust_plan(sc);
    if (pj.value("plan_key", std::string()) != plan_key(sc))
        throw InputError(poly_path, "polytope was computed for different inputs or options; rerun advset");

    const auto pts = advset::sample(poly, sc.seed, *nsample);
    std::vector<sim::EventTimeline> tls;
    for (const auto& p : pts) tls.push_back(advset::timeline_for(sc.model, poly, p));
    const auto trs = simulate_all(sc, plan, tls);

    std::ostringstream csv;
    csv << "sample";
    for (const auto& a : poly.axes) csv << ',' << a.label();
    csv << ",violations,max_imbalance_w,max_shortfall_w,min_soc_margin_wh\n";
    sim::ViolationSummary total;
    int clean = 0;
    for (std::size_t s = 0; s < trs.size(); ++s) {
        const auto rep = sim::violation_report(trs[s]);
        for (int c = 0; c < static_cast<int>(sim::ViolationClass::Count); ++c) {
            total.count[c] += rep.count[c];
            total.max[c] = std::max(total.max[c], rep.max[c]);
        }
        clean += rep.clean();
        double imb = 0, sf = 0, margin = std::numeric_limits<double>::infinity();
        for (const auto& st : trs[s].steps) {
            imb = std::max(imb, std::abs(st.imbalance_w));
            sf = std::max(sf, st.shortfall_w);
            for (std::size_t u = 0; u < sc.model.storage.size(); ++u) {
                const auto& su = sc.model.storage[u];
                margin = std::min({margin, st.soc_end_wh[u] - su.energy_min_wh, su.energy_max_wh - st.soc_end_wh[u]});
            }
        }
        csv << s;
        for (double x : pts[s]) csv << ',' << fmt(x);
        csv << ',' << rep.total() << ',' << fmt(imb) << ',' << fmt(sf) << ','
            << (std::isfinite(margin) ? fmt(margin) : std::string("")) << '\n';
    }
    json sum = summary_json(total);
    sum["samples"] = *nsample;
    sum["clean_samples"] = clean;
    sum["seed"] = sc.seed;
    o.add("samples.csv", csv.str());
    o.add_json("summary.json", sum);
    finish(o, "simulate --sample", &sc, {poly_path}, sc.seed, t0);
    out << "simulate: " << clean << "/" << *nsample << " samples clean, " << total.total() << " violation(s)\n";
    return kOk;
}

int cmd_synth(const std::string& spec_path, const Global& g, std::ostream& out) {
    const auto t0 = Clock::now();
    grid::SynthSpec spec;
    std::vector<std::string> inputs;
    if (!spec_path.empty()) {
        spec = synth_spec_from_json(parse_json_file(spec_path), spec_path);
        inputs.push_back(spec_path);
    }
    if (g.seed) spec.seed = *g.seed;
    const auto m = grid::synth_feeder(spec);
    grid::require_valid(m);
    OutputSet o(g.out);
    o.add_json("network.json", grid::network_to_json(m));
    std::ostringstream prof;
    grid::write_profiles_csv(m, prof);
    o.add("profiles.csv", prof.str());
    finish(o, "synth", nullptr, inputs, spec.seed, t0);
    out << "synth: " << m.buses.size() << " buses, " << m.loads.size() << " loads\n";
    return kOk;
}

int cmd_validate(const std::string& path, const Global& g, std::ostream& out) {
    const auto j = parse_json_file(path);
    if (j.is_object() && j.contains("network")) {
        const auto sc = load_scenario(path, overrides(g));
        (void)sc.axis_caps();
        out << "validate: scenario ok (" << sc.model.buses.size() << " buses, " << sc.model.steps << " steps)\n";
    } else if (j.is_object() && j.contains("buses")) {
        auto m = grid::network_from_json(j, path);
        // profiles come from their own file; a bare network has none yet
        auto pad = [&](std::vector<double>& v) {
            if (v.empty()) v.assign(m.steps, 0.0);
        };
        for (auto& u : m.pv) pad(u.forecast_w);
        for (auto& l : m.loads) {
            pad(l.p_des_w);
            pad(l.p_min_w);
        }
        grid::require_valid(m);
        out << "validate: network ok (" << m.buses.size() << " buses)\n";
    } else if (j.is_object() && j.contains("outputs") && j.contains("inputs")) {
        const auto bad = verify_manifest(j, fs::path(path).parent_path().string());
        if (!bad.empty()) {
            std::string s;
            for (const auto& b : bad) s += "\n  " + b;
            throw InputError(path, "manifest does not match the files on disk:" + s);
        }
        out << "validate: manifest ok\n";
    } else {
        throw InputError(path, "not a scenario, network or manifest file");
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Microgrid dispatch, reserves and adversarial event analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    std::uint64_t seed = 0;
    int poly_sides = 0;
    double feas_tol = 0;
    auto* o_seed = app.add_option("--seed", seed, "Seed for every random stream");
    auto* o_sides = app.add_option("--poly-sides", poly_sides, "Sides of the apparent-power polygons");
    auto* o_tol = app.add_option("--feas-tol", feas_tol, "Feasibility tolerance (pu)");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();

    std::string path;
    auto* baseline = app.add_subcommand("baseline", "Cost-optimal dispatch");
    baseline->add_option("scenario", path, "Scenario JSON")->required();
    auto* rob = app.add_subcommand("robust", "Dispatch with reserves against the uncertainty box");
    rob->add_option("scenario", path, "Scenario JSON")->required();
    auto* adv = app.add_subcommand("advset", "Inner adversarial polytope of the robust plan");
    adv->add_option("scenario", path, "Scenario JSON")->required();
    std::vector<int> project;
    adv->add_option("--project", project, "Axis indices to project onto pairwise (polygon.csv)");
    auto* simc = app.add_subcommand("simulate", "Replay the scenario events, or sampled ones");
    simc->add_option("scenario", path, "Scenario JSON")->required();
    int nsample = 0;
    std::string poly_path;
    auto* o_sample = simc->add_option("--sample", nsample, "Number of events drawn from the polytope");
    simc->add_option("--polytope", poly_path, "Polytope file from advset (default <out>/polytope.json)");
    auto* syn = app.add_subcommand("synth", "Generate a synthetic feeder and its profiles");
    syn->add_option("spec", path, "Synthesis spec JSON (defaults: ieee123-like)");
    auto* val = app.add_subcommand("validate", "Check a scenario, network or manifest file");
    val->add_option("file", path, "File to check")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    if (o_seed->count()) g.seed = seed;
    if (o_sides->count()) g.poly_sides = poly_sides;
    if (o_tol->count()) g.feas_tol = feas_tol;

    try {
        if (*baseline) return cmd_baseline(path, g, out, err);
        if (*rob) return cmd_robust(path, g, out, err);
        if (*adv) return cmd_advset(path, project, g, out);
        if (*simc) return cmd_simulate(path, o_sample->count() ? std::optional<int>(nsample) : std::nullopt, poly_path, g, out);
        if (*syn) return cmd_synth(path, g, out);
        if (*val) return cmd_validate(path, g, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const robust::UncertainEqualityRow& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const advset::MixedDirectionAxes& e) {
        err << "input error: scenario.axes: " << e.what() << "\n";
        return kInputError;
    } catch (const PlanInfeasible& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const advset::AxisInfeasible& e) {
        err << "downstream infeasible: " << e.what() << "\n";
        return kDownstreamInfeasible;
    }
    return kInputError;
}

}  // namespace mgres::scenario
