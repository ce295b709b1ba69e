// Command-line front end: analyze a channel's peripheral structure, evaluate
// capacity bounds over an (n, epsilon) grid, certify the zero-error protocol
// constructions, and tabulate the diamond-norm convergence sequence.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 certification
// failure.

#include "qms/capacities.hpp"
#include "qms/channels.hpp"
#include "qms/protocols.hpp"
#include "qms/sdp.hpp"
#include "qms/spectral.hpp"
#include "qms/structure.hpp"
#include "qms/zoo.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct CommonOpts {
    std::string zoo;
    std::string input;
    int dim = 2;
    double gamma = -1.0;   // unset: zoo constructions use their own defaults
    std::uint64_t seed = 0;
    double tol = 1e-8;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("input", o.input, "channel JSON file");
    cmd->add_option("--zoo", o.zoo, "zoo channel spec, e.g. identity, ad:0.75, pinching*ad");
    cmd->add_option("--dim", o.dim, "dimension for zoo channels that take one");
    cmd->add_option("--gamma", o.gamma, "damping/decay parameter for zoo channels that take one");
    cmd->add_option("--seed", o.seed, "seed for randomized steps and random zoo channels");
    cmd->add_option("--tol", o.tol, "spectral clustering tolerance");
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

qms::Channel resolve_channel(const CommonOpts& o) {
    if (!o.zoo.empty()) return qms::make_zoo(o.zoo, o.dim, o.gamma, o.seed).channel;
    if (!o.input.empty()) return qms::load_channel(o.input);
    throw std::invalid_argument("no channel given: pass a JSON file or --zoo NAME");
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + o.out);
    f << text;
}

std::vector<long> parse_n_range(const std::string& s) {
    const auto dots = s.find("..");
    std::vector<long> ns;
    if (dots == std::string::npos) {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) ns.push_back(std::stol(item));
    } else {
        const long a = std::stol(s.substr(0, dots));
        const long b = std::stol(s.substr(dots + 2));
        for (long n = a; n <= b; ++n) ns.push_back(n);
    }
    if (ns.empty()) throw std::invalid_argument("empty n range");
    for (long n : ns)
        if (n < 1) throw std::invalid_argument("n values must be >= 1");
    return ns;
}

std::vector<double> parse_eps_list(const std::string& s) {
    std::vector<double> eps;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) eps.push_back(std::stod(item));
    if (eps.empty()) throw std::invalid_argument("empty epsilon list");
    for (double e : eps)
        if (e < 0.0 || e >= 1.0) throw std::invalid_argument("epsilon values must be in [0,1)");
    return eps;
}

json matrix_json(const qms::CMat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int cmd_analyze(const CommonOpts& o) {
    const qms::Channel phi = resolve_channel(o);
    const qms::Analysis a = qms::analyze_channel(phi, o.tol, o.seed);

    if (o.format == "json") {
        json doc;
        doc["schema"] = 1;
        doc["dim"] = a.channel.dim_in;
        doc["dim_h0"] = a.decomp.dim_h0;
        doc["num_blocks"] = a.decomp.blocks.size();
        doc["mu"] = a.mu;
        doc["residual"] = a.decomp.residual;
        doc["canonical_not_unique"] = a.decomp.canonical_not_unique;
        json blocks = json::array();
        for (const auto& b : a.decomp.blocks) {
            json jb;
            jb["d"] = b.d;
            jb["m"] = b.m;
            jb["delta"] = matrix_json(b.delta);
            jb["unitary"] = matrix_json(b.unitary);
            blocks.push_back(std::move(jb));
        }
        doc["blocks"] = std::move(blocks);
        doc["pi"] = a.decomp.pi;
        json eigs = json::array();
        for (const auto& c : a.spectrum.clusters) {
            json jc;
            jc["re"] = c.value.real();
            jc["im"] = c.value.imag();
            jc["algebraic"] = c.algebraic;
            jc["geometric"] = c.geometric;
            jc["peripheral"] = c.peripheral;
            jc["ambiguous"] = c.ambiguous;
            eigs.push_back(std::move(jc));
        }
        doc["eigenvalues"] = std::move(eigs);
        emit(o, doc.dump(2) + "\n");
        return 0;
    }

    std::ostringstream csv;
    csv << "record,field1,field2,field3,field4,field5\n";
    csv << "summary," << a.channel.dim_in << "," << a.decomp.dim_h0 << ","
        << a.decomp.blocks.size() << "," << fmt(a.mu) << ",\n";
    for (const auto& b : a.decomp.blocks)
        csv << "block," << b.index << "," << b.d << "," << b.m << ",,\n";
    for (const auto& b : a.decomp.blocks)
        for (int i = 0; i < b.m; ++i)
            for (int j = 0; j < b.m; ++j)
                csv << "delta," << b.index << "," << i << "," << j << ","
                    << fmt(b.delta(i, j).real()) << "," << fmt(b.delta(i, j).imag()) << "\n";
    for (std::size_t k = 0; k < a.decomp.pi.size(); ++k)
        csv << "pi," << k << "," << a.decomp.pi[k] << ",,,\n";
    for (const auto& c : a.spectrum.clusters)
        csv << "eigenvalue," << fmt(c.value.real()) << "," << fmt(c.value.imag()) << ","
            << c.algebraic << "," << (c.peripheral ? "peripheral" : (c.ambiguous ? "ambiguous" : "interior"))
            << ",\n";
    emit(o, csv.str());
    return 0;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

int cmd_bounds(const CommonOpts& o, const std::string& n_range, const std::string& eps_list,
               const std::string& delta_source) {
    const qms::Channel phi = resolve_channel(o);
    const qms::Analysis a = qms::analyze_channel(phi, o.tol, o.seed);
    const auto ns = parse_n_range(n_range);
    const auto eps = parse_eps_list(eps_list);

    // deltas per n
    std::vector<double> deltas(ns.size(), 0.0);
    std::vector<std::string> sources(ns.size(), "sdp");
    double kappa = 0.0, mu = a.mu;
    if (delta_source == "envelope" || *std::max_element(ns.begin(), ns.end()) > 30) {
        std::vector<long> fit_range;
        for (long n = 1; n <= 12; ++n) fit_range.push_back(n);
        const qms::KappaFit fit = qms::fit_kappa(phi, a.asym, fit_range);
        kappa = fit.kappa;
        mu = fit.mu;
    }
    if (delta_source == "sdp") {
        std::vector<long> sdp_ns;
        for (std::size_t i = 0; i < ns.size(); ++i)
            if (ns[i] <= 30) sdp_ns.push_back(ns[i]);
        const auto vals = qms::delta_sequence(phi, a.asym, sdp_ns);
        std::size_t j = 0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (ns[i] <= 30) {
                deltas[i] = vals[j++];
            } else {
                deltas[i] = kappa * std::pow(mu, static_cast<double>(ns[i]));
                sources[i] = "envelope";
            }
        }
    } else {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            deltas[i] = kappa * std::pow(mu, static_cast<double>(ns[i]));
            sources[i] = "envelope";
        }
    }

    std::ostringstream csv;
    json jrows = json::array();
    csv << "n,epsilon,kind,lower,upper,delta_used,delta_source\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
        for (double e : eps) {
            const qms::BoundsReport rep =
                qms::upper_bounds(a.decomp, e, ns[i], deltas[i], sources[i]);
            for (auto kind : qms::kAllKinds) {
                const auto& kb = rep.kinds[static_cast<int>(kind)];
                if (o.format == "json") {
                    json r;
                    r["n"] = ns[i];
                    r["epsilon"] = e;
                    r["kind"] = qms::kind_name(kind);
                    r["lower"] = kb.lower;
                    if (kb.valid) r["upper"] = *kb.upper;
                    r["delta_used"] = deltas[i];
                    r["delta_source"] = sources[i];
                    jrows.push_back(std::move(r));
                } else {
                    csv << ns[i] << "," << fmt(e) << "," << qms::kind_name(kind) << ","
                        << fmt(kb.lower) << "," << (kb.valid ? fmt(*kb.upper) : "") << ","
                        << fmt(deltas[i]) << "," << sources[i] << "\n";
                }
            }
        }
    if (o.format == "json") {
        json doc;
        doc["schema"] = 1;
        doc["rows"] = std::move(jrows);
        emit(o, doc.dump(2) + "\n");
    } else {
        emit(o, csv.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const CommonOpts& o, const std::string& n_list, bool sabotage) {
    const qms::Channel phi = resolve_channel(o);
    const qms::Analysis a = qms::analyze_channel(phi, o.tol, o.seed);
    const auto ns = parse_n_range(n_list);

    const qms::QuantumCode qc = qms::build_quantum_code(phi, a.asym, a.decomp);
    const qms::ClassicalCode cc = qms::build_classical_code(a.decomp);
    const qms::EACode ea = qms::build_ea_code(a.decomp);

    struct Row {
        std::string family;
        long n;
        double rate, error, env_fid;
        bool pass;
    };
    std::vector<Row> rows;
    for (long n : ns) {
        const auto rq = qms::eval_quantum_code(qc, phi, n, sabotage);
        rows.push_back({"quantum", n, qc.rate_bits, rq.worst_error, 1.0, rq.pass});
        const auto rc = qms::eval_classical_code(cc, phi, n);
        rows.push_back({"classical", n, cc.rate_bits, rc.worst_error, 1.0, rc.pass});
        const auto re = qms::eval_ea_code(ea, phi, n);
        rows.push_back({"ea", n, ea.rate_bits, re.worst_error, 1.0, re.pass});
        const auto [pc, rp] = qms::private_from_quantum(qc, phi, n);
        rows.push_back({"private", n, pc.rate_bits, rp.worst_error, rp.env_fidelity, rp.pass});
    }

    bool all_pass = true;
    for (const Row& r : rows) all_pass = all_pass && r.pass;

    if (o.format == "json") {
        json doc;
        doc["schema"] = 1;
        doc["sabotage"] = sabotage;
        json jr = json::array();
        for (const Row& r : rows) {
            json x;
            x["family"] = r.family;
            x["n"] = r.n;
            x["rate_bits"] = r.rate;
            x["error"] = r.error;
            x["env_fidelity"] = r.env_fid;
            x["pass"] = r.pass;
            jr.push_back(std::move(x));
        }
        doc["results"] = std::move(jr);
        doc["all_pass"] = all_pass;
        // full protocol bundle at the first evaluation time, for external replay
        {
            const long n0 = ns.front();
            json bundle;
            bundle["n"] = n0;
            json jq;
            jq["block_index"] = qc.block_index;
            jq["code_dim"] = qc.code_dim;
            jq["isometry"] = matrix_json(qc.isometry);
            jq["decoder_choi"] =
                matrix_json(qms::quantum_decoder(qc, n0, sabotage).choi);
            bundle["quantum"] = std::move(jq);
            json jc;
            jc["states"] = json::array();
            for (const auto& s : cc.states) jc["states"].push_back(matrix_json(s));
            jc["povm"] = json::array();
            for (const auto& e : qms::classical_povm(cc, phi, n0))
                jc["povm"].push_back(matrix_json(e));
            bundle["classical"] = std::move(jc);
            json je;
            je["messages"] = json::array();
            for (const auto& m : ea.messages)
                je["messages"].push_back({m.block, m.shift, m.phase});
            je["ref_dim"] = ea.ref_dim;
            bundle["ea"] = std::move(je);
            const auto [pc0, rp0] = qms::private_from_quantum(qc, phi, n0);
            json jp;
            jp["states"] = json::array();
            for (const auto& s : pc0.states) jp["states"].push_back(matrix_json(s));
            jp["povm"] = json::array();
            for (const auto& e : pc0.povm) jp["povm"].push_back(matrix_json(e));
            bundle["private"] = std::move(jp);
            doc["bundle"] = std::move(bundle);
        }
        emit(o, doc.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << "family,n,rate_bits,error,env_fidelity,pass\n";
        for (const Row& r : rows)
            csv << r.family << "," << r.n << "," << fmt(r.rate) << "," << fmt(r.error) << ","
                << fmt(r.env_fid) << "," << (r.pass ? "1" : "0") << "\n";
        emit(o, csv.str());
    }
    return all_pass ? 0 : 4;
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

int cmd_convergence(const CommonOpts& o, const std::string& n_range, long iid_m) {
    const qms::Channel phi = resolve_channel(o);
    const qms::Analysis a = qms::analyze_channel(phi, o.tol, o.seed);
    const auto ns = parse_n_range(n_range);
    const qms::KappaFit fit = qms::fit_kappa(phi, a.asym, ns);

    const double mfac = static_cast<double>(iid_m);
    if (o.format == "json") {
        json doc;
        doc["schema"] = 1;
        doc["kappa"] = fit.kappa;
        doc["mu"] = fit.mu;
        doc["exact_convergence"] = fit.exact_convergence;
        doc["fitted_slope"] = fit.fitted_slope;
        doc["target_slope"] = fit.target_slope;
        doc["slope_ok"] = fit.slope_ok;
        doc["iid_m"] = iid_m;
        json rows = json::array();
        for (const auto& [n, dn] : fit.deltas) {
            const double env = mfac * fit.kappa * std::pow(fit.mu, static_cast<double>(n));
            json r;
            r["n"] = n;
            r["delta"] = dn;
            r["envelope"] = env;
            r["ratio"] = env > 0 ? dn * mfac / env : 0.0;
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        emit(o, doc.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << "# kappa=" << fmt(fit.kappa) << " mu=" << fmt(fit.mu)
            << " exact=" << (fit.exact_convergence ? 1 : 0) << " slope=" << fmt(fit.fitted_slope)
            << " target_slope=" << fmt(fit.target_slope) << " slope_ok=" << (fit.slope_ok ? 1 : 0)
            << " iid_m=" << iid_m << "\n";
        csv << "n,delta,envelope,ratio\n";
        for (const auto& [n, dn] : fit.deltas) {
            const double env = mfac * fit.kappa * std::pow(fit.mu, static_cast<double>(n));
            csv << n << "," << fmt(dn) << "," << fmt(env) << ","
                << fmt(env > 0 ? dn * mfac / env : 0.0) << "\n";
        }
        emit(o, csv.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"peripheral-structure analysis and one-shot capacity bounds for "
                 "discrete-time quantum Markov semigroups"};
    app.require_subcommand(1);

    CommonOpts oa, ob, ov, oc;
    std::string n_range = "1..10";
    std::string eps_list = "0,0.05,0.1";
    std::string delta_source = "sdp";
    std::string verify_ns = "1,5,25";
    bool sabotage = false;
    long iid_m = 1;

    CLI::App* analyze = app.add_subcommand("analyze", "peripheral structure report");
    add_common(analyze, oa);

    CLI::App* bounds = app.add_subcommand("bounds", "capacity bounds over an (n, epsilon) grid");
    add_common(bounds, ob);
    bounds->add_option("--n-range", n_range, "n range A..B or comma list");
    bounds->add_option("--epsilon", eps_list, "comma-separated epsilon values");
    bounds->add_option("--delta-source", delta_source, "sdp or envelope")
        ->check(CLI::IsMember({"sdp", "envelope"}));

    CLI::App* verify = app.add_subcommand("verify", "build and certify the zero-error protocols");
    add_common(verify, ov);
    verify->add_option("--n-list", verify_ns, "evaluation times, comma list");
    verify->add_flag("--sabotage-decoder", sabotage, "negative control: skip the decoder inversion");

    CLI::App* conv = app.add_subcommand("convergence", "Delta_n table with fitted envelope");
    add_common(conv, oc);
    conv->add_option("--n-range", n_range, "n range A..B or comma list");
    conv->add_option("--iid", iid_m, "IID mode: multiply the envelope by m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(oa);
        if (bounds->parsed()) return cmd_bounds(ob, n_range, eps_list, delta_source);
        if (verify->parsed()) return cmd_verify(ov, verify_ns, sabotage);
        if (conv->parsed()) return cmd_convergence(oc, n_range, iid_m);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const qms::cptp_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
