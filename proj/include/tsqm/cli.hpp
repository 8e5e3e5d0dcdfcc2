#pragma once

// Command-line front end. Subcommands produce CSV or JSON on stdout (or a
// file); all numeric output is printed with 17 significant digits and every
// random quantity is derived from --seed, so identical invocations produce
// byte-identical output.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsqm/meter.hpp"
#include "tsqm/qcore.hpp"
#include "tsqm/report.hpp"
#include "tsqm/scenarios.hpp"
#include "tsqm/states.hpp"
#include "tsqm/superosc.hpp"
#include "tsqm/tsv.hpp"

namespace tsqm::cli {

namespace detail {

using tsqm::detail::fmt_double;

struct Window {
    double lo = 0.0;
    double hi = 1.0;
    int points = 801;
};

// "lo:hi" or "lo:hi:points"
inline Window parse_window(const std::string& text) {
    Window w;
    std::istringstream in(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 2 && parts.size() != 3)
        throw std::invalid_argument("window must be lo:hi or lo:hi:points");
    w.lo = std::stod(parts[0]);
    w.hi = std::stod(parts[1]);
    if (parts.size() == 3) w.points = std::stoi(parts[2]);
    if (!(w.hi > w.lo) || w.points < 2) throw std::invalid_argument("bad window");
    return w;
}

// A state is either a catalog name or an inline literal of comma-separated
// re,im pairs: "0.707,0,0.707,0" is (|0> + |1>)/sqrt(2).
inline StateVector parse_state(const std::string& text) {
    if (auto named = states::named_state(text)) return *named;
    std::vector<double> vals;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.empty() || vals.size() % 2 != 0)
        throw std::invalid_argument("state literal needs an even number of values (re,im pairs)");
    std::vector<Amplitude> amps(vals.size() / 2);
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = {vals[2 * i], vals[2 * i + 1]};
    return StateVector(std::move(amps));
}

inline Observable parse_observable(const std::string& text) {
    if (auto named = states::named_observable(text)) return *named;
    throw std::invalid_argument("unknown observable '" + text + "'");
}

// Inline literals carry numeric labels; adopt the observable's basis so the
// two can be combined.
inline StateVector relabel_for(const StateVector& s, const Observable& obs) {
    if (s.dimension() != obs.dimension())
        throw DimensionMismatch("state and observable dimensions differ");
    if (s.basis() == obs.basis()) return s;
    bool numeric = true;
    for (std::size_t i = 0; i < s.dimension(); ++i)
        if (s.basis()[i] != std::to_string(i)) numeric = false;
    if (!numeric) throw DimensionMismatch("state and observable use different basis labels");
    return StateVector(s.amplitudes(), obs.basis());
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream;

    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream = &fallback;
        } else {
            file.open(path);
            if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
            stream = &file;
        }
    }
    std::ostream& out() { return *stream; }
};

inline void emit_density_csv(std::ostream& os, const ReadoutDensity& d) {
    os << "readout,density\n";
    for (std::size_t i = 0; i < d.grid.size(); ++i)
        os << fmt_double(d.grid[i]) << "," << fmt_double(d.density[i]) << "\n";
}

inline void emit_density_json(std::ostream& os, const ReadoutDensity& d) {
    os << "{\"grid\":[";
    for (std::size_t i = 0; i < d.grid.size(); ++i)
        os << (i ? "," : "") << fmt_double(d.grid[i]);
    os << "],\"density\":[";
    for (std::size_t i = 0; i < d.density.size(); ++i)
        os << (i ? "," : "") << fmt_double(d.density[i]);
    os << "]}\n";
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-state-vector quantum simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // --format/--out/--seed may follow the subcommand

    std::string format = "csv";
    std::string out_path;
    std::uint64_t seed = 0;
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json", "table"}));
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--seed", seed, "random seed (default 0)");

    // scenario
    auto* sc = app.add_subcommand("scenario", "run a named paradox scenario");
    std::string sc_name;
    bool sc_all = false;
    sc->add_option("--name", sc_name, "scenario name");
    sc->add_flag("--all", sc_all, "run every scenario");

    // density
    auto* de = app.add_subcommand("density", "exact meter readout density");
    std::string de_pre = "up_x", de_post, de_obs = "sigma_xi";
    double de_delta = 1.0, de_lambda = 1.0;
    de->add_option("--pre", de_pre, "pre-selected state");
    de->add_option("--post", de_post, "post-selected state (omit for pre-only density)");
    de->add_option("--obs", de_obs, "measured observable");
    de->add_option("--delta", de_delta, "pointer width")->required();
    de->add_option("--lambda", de_lambda, "coupling strength");

    // sample
    auto* sa = app.add_subcommand("sample", "Monte Carlo meter trials with post-selection");
    std::string sa_pre = "up_x", sa_post = "up_y", sa_obs = "sigma_xi";
    double sa_delta = 1.0, sa_lambda = 1.0;
    std::uint64_t sa_trials = 0;
    sa->add_option("--pre", sa_pre, "pre-selected state");
    sa->add_option("--post", sa_post, "post-selected state");
    sa->add_option("--obs", sa_obs, "measured observable");
    sa->add_option("--delta", sa_delta, "pointer width")->required();
    sa->add_option("--lambda", sa_lambda, "coupling strength");
    sa->add_option("--trials", sa_trials, "number of trials")->required();

    // collective
    auto* co = app.add_subcommand("collective", "collective-observable readout density");
    std::string co_pre = "up_x", co_post = "up_y", co_obs = "sigma_xi";
    double co_delta = 1.0, co_lambda = 1.0;
    int co_n = 1;
    co->add_option("--n", co_n, "number of particles")->required();
    co->add_option("--pre", co_pre, "single-particle pre-selected state");
    co->add_option("--post", co_post, "single-particle post-selected state");
    co->add_option("--obs", co_obs, "single-particle observable");
    co->add_option("--delta", co_delta, "pointer width")->required();
    co->add_option("--lambda", co_lambda, "coupling strength");

    // superosc
    auto* su = app.add_subcommand("superosc", "superoscillation synthesis table");
    double su_alpha = 0.0, su_lambda = 1.0;
    int su_terms = 0;
    std::string su_window = "-1:1:401";
    su->add_option("--alpha", su_alpha, "target local frequency")->required();
    su->add_option("--terms", su_terms, "binomial order N")->required();
    su->add_option("--lambda", su_lambda, "scale");
    su->add_option("--window", su_window, "evaluation window lo:hi[:points]");

    // shift-demo
    auto* sh = app.add_subcommand("shift-demo", "shift-superposition reconstruction table");
    int sh_terms = 0;
    double sh_target = 10.0;
    std::string sh_window = "0:20:801";
    sh->add_option("--terms", sh_terms, "binomial order N")->required();
    sh->add_option("--alpha", sh_target, "target shift (default 10)");
    sh->add_option("--window", sh_window, "window lo:hi[:points]");

    // nosignal
    auto* no = app.add_subcommand("nosignal", "pre-only marginal independence check");
    std::string no_pre = "up_x", no_obs = "sigma_xi";
    double no_delta = 1.0, no_lambda = 1.0;
    no->add_option("--pre", no_pre, "pre-selected state");
    no->add_option("--obs", no_obs, "measured observable");
    no->add_option("--delta", no_delta, "pointer width")->required();
    no->add_option("--lambda", no_lambda, "coupling strength");

    std::vector<const char*> argv;
    argv.push_back("tsqm");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help() << std::flush;
            return 0;
        }
        err << "error: " << e.what() << "\n" << app.help() << std::flush;
        return 2;
    }

    try {
        detail::OutputTarget target(out_path, out);
        std::ostream& os = target.out();

        if (*sc) {
            std::vector<ScenarioReport> reports;
            if (sc_all) {
                for (const auto& [name, fn] : scenarios::registry()) reports.push_back(fn());
            } else {
                bool found = false;
                for (const auto& [name, fn] : scenarios::registry())
                    if (name == sc_name) {
                        reports.push_back(fn());
                        found = true;
                    }
                if (!found)
                    throw std::invalid_argument("unknown scenario '" + sc_name +
                                                "' (use --all or a registry name)");
            }
            if (format == "json") {
                os << "{\"reports\":[";
                for (std::size_t i = 0; i < reports.size(); ++i)
                    os << (i ? "," : "") << to_json(reports[i]);
                bool ok = true;
                for (const auto& r : reports) ok = ok && r.all_pass();
                os << "],\"all_pass\":" << (ok ? "true" : "false") << "}\n";
            } else if (format == "table") {
                for (const auto& r : reports) os << to_table(r) << "\n";
            } else {
                os << "scenario,label,computed_re,computed_im,expected_re,expected_im,source,"
                      "tolerance,pass\n";
                for (const auto& r : reports)
                    for (const auto& e : r.entries)
                        os << r.name << "," << e.label << ","
                           << detail::fmt_double(e.computed.real()) << ","
                           << detail::fmt_double(e.computed.imag()) << ","
                           << detail::fmt_double(e.expected.real()) << ","
                           << detail::fmt_double(e.expected.imag()) << ","
                           << to_string(e.source) << "," << detail::fmt_double(e.tolerance)
                           << "," << (e.pass ? "true" : "false") << "\n";
            }
            for (const auto& r : reports)
                if (!r.all_pass()) return 1;
            return 0;
        }

        if (*de) {
            const Observable obs = detail::parse_observable(de_obs);
            const StateVector pre = detail::relabel_for(detail::parse_state(de_pre), obs);
            const MeterConfig cfg{de_lambda, de_delta};
            ReadoutDensity d = de_post.empty()
                    ? preonly_density(pre, obs, cfg)
                    : postselected_meter_distribution(
                              PrePostEnsemble(pre, detail::relabel_for(
                                                           detail::parse_state(de_post), obs)),
                              obs, cfg);
            format == "json" ? detail::emit_density_json(os, d)
                             : detail::emit_density_csv(os, d);
            return 0;
        }

        if (*sa) {
            const Observable obs = detail::parse_observable(sa_obs);
            const StateVector pre = detail::relabel_for(detail::parse_state(sa_pre), obs);
            const StateVector post = detail::relabel_for(detail::parse_state(sa_post), obs);
            const MeterConfig cfg{sa_lambda, sa_delta};
            const auto records = sample_run(PrePostEnsemble(pre, post), obs, cfg, sa_trials, seed);
            std::uint64_t n_acc = 0;
            double sum_acc = 0.0;
            if (format == "json") {
                os << "{\"records\":[";
                for (std::size_t i = 0; i < records.size(); ++i) {
                    const auto& rec = records[i];
                    if (rec.postselected) {
                        ++n_acc;
                        sum_acc += rec.readout;
                    }
                    os << (i ? "," : "") << "{\"trial\":" << rec.trial_index
                       << ",\"readout\":" << detail::fmt_double(rec.readout)
                       << ",\"accepted\":" << (rec.postselected ? "true" : "false") << "}";
                }
                os << "],\"accepted_count\":" << n_acc << ",\"accepted_mean\":"
                   << detail::fmt_double(n_acc ? sum_acc / double(n_acc)
                                               : std::numeric_limits<double>::quiet_NaN())
                   << "}\n";
            } else {
                os << "trial,readout,accepted,accepted_count,accepted_mean\n";
                for (const auto& rec : records) {
                    if (rec.postselected) {
                        ++n_acc;
                        sum_acc += rec.readout;
                    }
                    os << rec.trial_index << "," << detail::fmt_double(rec.readout) << ","
                       << (rec.postselected ? 1 : 0) << "," << n_acc << ","
                       << detail::fmt_double(n_acc ? sum_acc / double(n_acc)
                                                   : std::numeric_limits<double>::quiet_NaN())
                       << "\n";
                }
            }
            return 0;
        }

        if (*co) {
            const Observable obs = detail::parse_observable(co_obs);
            const StateVector pre = detail::relabel_for(detail::parse_state(co_pre), obs);
            const StateVector post = detail::relabel_for(detail::parse_state(co_post), obs);
            const MeterConfig cfg{co_lambda, co_delta};
            const ReadoutDensity d = collective_density(co_n, pre, post, obs, cfg);
            format == "json" ? detail::emit_density_json(os, d)
                             : detail::emit_density_csv(os, d);
            return 0;
        }

        if (*su) {
            const auto w = detail::parse_window(su_window);
            const FourierSum f = build_superoscillation({su_alpha, su_terms, su_lambda});
            std::vector<double> xs(w.points);
            for (int i = 0; i < w.points; ++i)
                xs[i] = w.lo + (w.hi - w.lo) * double(i) / double(w.points - 1);
            const auto values = evaluate(f, xs);
            auto freq_at = [&](double x) {
                try {
                    return detail::fmt_double(local_frequency(f, x));
                } catch (const ZeroModulus&) {
                    return std::string("nan");
                }
            };
            if (format == "json") {
                os << "{\"x\":[";
                for (int i = 0; i < w.points; ++i) os << (i ? "," : "") << detail::fmt_double(xs[i]);
                os << "],\"re\":[";
                for (int i = 0; i < w.points; ++i)
                    os << (i ? "," : "") << detail::fmt_double(values[i].real());
                os << "],\"im\":[";
                for (int i = 0; i < w.points; ++i)
                    os << (i ? "," : "") << detail::fmt_double(values[i].imag());
                os << "],\"abs\":[";
                for (int i = 0; i < w.points; ++i)
                    os << (i ? "," : "") << detail::fmt_double(std::abs(values[i]));
                os << "],\"local_frequency\":[";
                for (int i = 0; i < w.points; ++i) {
                    const std::string s = freq_at(xs[i]);
                    os << (i ? "," : "") << (s == "nan" ? "null" : s);
                }
                os << "]}\n";
            } else {
                os << "x,re,im,abs,local_frequency\n";
                for (int i = 0; i < w.points; ++i)
                    os << detail::fmt_double(xs[i]) << "," << detail::fmt_double(values[i].real())
                       << "," << detail::fmt_double(values[i].imag()) << ","
                       << detail::fmt_double(std::abs(values[i])) << "," << freq_at(xs[i])
                       << "\n";
            }
            return 0;
        }

        if (*sh) {
            const auto w = detail::parse_window(sh_window);
            const double alpha = AffineShiftMap{}.invert(sh_target);
            auto series = make_superosc_series<BigReal>(BigReal(alpha), sh_terms, BigReal(1));
            std::vector<BigReal> shifts(series.wavenumbers.size());
            for (std::size_t i = 0; i < shifts.size(); ++i)
                shifts[i] = BigReal(0.5) * series.wavenumbers[i] + BigReal(0.5);
            GaussianPulse<BigReal> pulse{BigReal(12.0)};

            std::vector<double> ts(w.points), approx(w.points), ref(w.points);
            std::vector<BigReal> terms(series.coefficients.size());
            double max_err = 0.0;
            for (int i = 0; i < w.points; ++i) {
                const BigReal t = BigReal(w.lo) +
                                  BigReal(w.hi - w.lo) * BigReal(i) / BigReal(w.points - 1);
                for (std::size_t k = 0; k < terms.size(); ++k)
                    terms[k] = series.coefficients[k] * pulse(t - shifts[k]);
                const BigReal s = rmath::pairwise_sum(terms.data(), terms.size());
                ts[i] = double(t);
                approx[i] = double(s);
                ref[i] = double(pulse(t - BigReal(sh_target)));
                max_err = std::max(max_err, std::abs(approx[i] - ref[i]));
            }
            if (format == "json") {
                os << "{\"t\":[";
                for (int i = 0; i < w.points; ++i) os << (i ? "," : "") << detail::fmt_double(ts[i]);
                os << "],\"approx\":[";
                for (int i = 0; i < w.points; ++i)
                    os << (i ? "," : "") << detail::fmt_double(approx[i]);
                os << "],\"target\":[";
                for (int i = 0; i < w.points; ++i) os << (i ? "," : "") << detail::fmt_double(ref[i]);
                os << "],\"max_abs_error\":" << detail::fmt_double(max_err) << "}\n";
            } else {
                os << "t,approx,target,abs_error\n";
                for (int i = 0; i < w.points; ++i)
                    os << detail::fmt_double(ts[i]) << "," << detail::fmt_double(approx[i]) << ","
                       << detail::fmt_double(ref[i]) << ","
                       << detail::fmt_double(std::abs(approx[i] - ref[i])) << "\n";
            }
            return 0;
        }

        if (*no) {
            const Observable obs = detail::parse_observable(no_obs);
            const StateVector pre = detail::relabel_for(detail::parse_state(no_pre), obs);
            const MeterConfig cfg{no_lambda, no_delta};
            std::vector<std::vector<StateVector>> bases;
            if (obs.dimension() == 2 && obs.basis() == states::sigma_y().basis()) {
                bases.push_back(eigenbasis(states::sigma_y()));
                bases.push_back(eigenbasis(states::sigma_z()));
            } else {
                states::Rng rng(seed);
                for (int b = 0; b < 2; ++b) {
                    Observable h = states::random_hermitian(obs.dimension(), rng);
                    auto basis = eigenbasis(h);
                    std::vector<StateVector> relabeled;
                    for (const auto& v : basis)
                        relabeled.emplace_back(v.amplitudes(), obs.basis());
                    bases.push_back(std::move(relabeled));
                }
            }
            const double dev = no_signaling_check(pre, obs, cfg, bases);
            if (format == "json")
                os << "{\"max_deviation\":" << detail::fmt_double(dev) << "}\n";
            else
                os << "max_deviation\n" << detail::fmt_double(dev) << "\n";
            return 0;
        }

        err << "error: no subcommand selected\n" << app.help() << std::flush;
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace tsqm::cli
