#include "hkt/cli.hpp"

#include "hkt/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace hkt::cli {

using json = nlohmann::ordered_json;
using quat::ParameterClass;
using quat::Quaternion;

namespace {

// Points closer than this to a singular plane are not used in residual
// sweeps: near the planes the fields grow like |tau|^-3 and the absolute
// thresholds would only measure finite-difference truncation.
constexpr double kSweepClearance = 0.25;
constexpr double kEomClearance = 0.6;
constexpr double kHktStep = 1e-4;

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

Quaternion read_quaternion(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 4) fail(path, "expected an array of 4 numbers [w, x, y, z]");
    double v[4];
    for (int i = 0; i < 4; ++i) {
        if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        v[i] = j[i].get<double>();
        if (!std::isfinite(v[i])) fail(path + "[" + std::to_string(i) + "]", "not finite");
    }
    return {v[0], v[1], v[2], v[3]};
}

void only_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

std::string location(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') ++line, col = 1;
        else ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunInput parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string what = e.what();
        if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
        throw ConfigError("syntax error at " + location(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + what);
    }
    if (!doc.is_object()) fail("(top level)", "expected an object");
    only_keys(doc, {"taus", "box", "form", "mbrane"}, "");
    RunInput in;
    if (!doc.contains("taus")) fail("taus", "required field missing");
    const json& taus = doc["taus"];
    if (!taus.is_array()) fail("taus", "expected an array");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const std::string path = "taus[" + std::to_string(i) + "]";
        const json& t = taus[i];
        if (!t.is_object()) fail(path, "expected an object");
        only_keys(t, {"p1", "p2", "a", "r"}, path);
        for (const char* key : {"p1", "p2", "a", "r"})
            if (!t.contains(key)) fail(path + "." + key, "required field missing");
        brane::TauMap m;
        m.p1 = read_quaternion(t["p1"], path + ".p1");
        m.p2 = read_quaternion(t["p2"], path + ".p2");
        m.a = read_quaternion(t["a"], path + ".a");
        if (!t["r"].is_number()) fail(path + ".r", "expected a number");
        m.weight = t["r"].get<double>();
        if (m.p1.norm2() == 0 && m.p2.norm2() == 0) fail(path, "degenerate tau: p1 and p2 both vanish");
        if (!(m.weight > 0) || !std::isfinite(m.weight)) fail(path + ".r", "weight must be a positive number");
        in.superposition.taus.push_back(m);
    }
    if (doc.contains("box")) {
        const json& b = doc["box"];
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) fail("box", "expected [lo, hi]");
        in.superposition.box_lo = b[0].get<double>();
        in.superposition.box_hi = b[1].get<double>();
        if (!(in.superposition.box_lo < in.superposition.box_hi)) fail("box", "lo must be smaller than hi");
    }
    if (doc.contains("form")) {
        if (!doc["form"].is_string()) fail("form", "expected a string");
        in.form = calib::parse_kind(doc["form"].get<std::string>());
        if (!in.form) fail("form", "expected one of mixed_ij, kahler2_phi, cayley_phi, phi_j");
    }
    if (doc.contains("mbrane")) {
        const json& m = doc["mbrane"];
        if (!m.is_object()) fail("mbrane", "expected an object");
        only_keys(m, {"kind", "q"}, "mbrane");
        if (!m.contains("kind") || !m["kind"].is_string()) fail("mbrane.kind", "expected \"M2\" or \"M5\"");
        if (!m.contains("q") || !m["q"].is_number()) fail("mbrane.q", "expected a number");
        MBraneRequest r;
        const std::string kind = m["kind"].get<std::string>();
        if (kind == "M2") r.kind = brane::MKind::M2;
        else if (kind == "M5") r.kind = brane::MKind::M5;
        else fail("mbrane.kind", "expected \"M2\" or \"M5\"");
        r.q = m["q"].get<double>();
        if (!(r.q > 0)) fail("mbrane.q", "charge parameter must be positive");
        in.mbrane = r;
    }
    if (taus.empty() && !in.mbrane) in.warnings.push_back("empty tau list: flat configuration");
    if (!in.superposition.general_position())
        in.warnings.push_back("singular planes not in general position; the metric may be incomplete");
    return in;
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Report::to_json() const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["passed"] = passed();
    json cs = json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"threshold", c.threshold}, {"pass", c.pass}});
    j["checks"] = cs;
    j["warnings"] = warnings;
    json d = json::object();
    for (const auto& [k, v] : details) d[k] = json::parse(v);
    j["details"] = d;
    json s = json::array();
    for (const auto& [k, v] : sidecars) s.push_back(k);
    j["sidecars"] = s;
    return j.dump(2) + "\n";
}

namespace {

void check(Report& r, const std::string& name, double value, const std::string& rel, double threshold) {
    bool pass = false;
    if (rel == "<") pass = value < threshold;
    else if (rel == ">") pass = value > threshold;
    else if (rel == "==") pass = value == threshold;
    if (std::isnan(value)) pass = false;
    r.checks.push_back({name, value, threshold, rel, pass});
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
    return s + "\n";
}

int samples_or(const RunOptions& o, int fallback) { return o.samples.value_or(fallback); }

void verify_hkt(const RunInput& in, const RunOptions& o, Report& rep) {
    const auto& cfg = in.superposition;
    const auto sol = brane::assemble_solution(cfg);
    const auto cls = brane::parameter_class(cfg);
    const exterior::FdOptions fd{o.step.value_or(kHktStep), true};
    const auto I = quat::left_triple(8), J = quat::right_triple(8);
    const auto pts = brane::sample_points(cfg, samples_or(o, 50), o.seed, std::max(kSweepClearance, 10 * fd.step));
    struct Row {
        brane::HktResidual j, i;
        double dH = 0, hermJ = 0, hermI = 0, clearance = 0;
    };
    std::vector<Row> rows(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
        Row& r = rows[k];
        r.j = brane::hkt_residual(sol, pts[k], J, fd);
        r.i = brane::hkt_residual(sol, pts[k], I, fd, -1);
        r.dH = exterior::exterior_derivative(sol.torsion, pts[k], fd).max_abs();
        const Matrix g = sol.metric(pts[k]);
        r.hermJ = brane::hermiticity_residual(g, J);
        r.hermI = brane::hermiticity_residual(g, I);
        r.clearance = cfg.singular_clearance(pts[k]);
    });
    double jmax = 0, imax = 0, imin = std::numeric_limits<double>::infinity(), dH = 0, hermJ = 0, hermI = 0, ratio = 0;
    std::string csv = csv_row({"point", "clearance", "J1", "J2", "J3", "I1", "I2", "I3", "dH"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Row& r = rows[k];
        jmax = std::max(jmax, r.j.max);
        imax = std::max(imax, r.i.max);
        imin = std::min(imin, r.i.max);
        dH = std::max(dH, r.dH);
        hermJ = std::max(hermJ, r.hermJ);
        hermI = std::max(hermI, r.hermI);
        const double pair = std::max(r.j.per[0], r.j.per[1]);
        if (pair > 1e-13) ratio = std::max(ratio, r.j.per[2] / pair);
        csv += csv_row({std::to_string(k), num(r.clearance), num(r.j.per[0]), num(r.j.per[1]), num(r.j.per[2]),
                        num(r.i.per[0]), num(r.i.per[1]), num(r.i.per[2]), num(r.dH)});
    }
    check(rep, "verify-hkt.J.max_residual", jmax, "<", 1e-5);
    const bool i_hkt = cls == ParameterClass::Real;
    if (i_hkt) check(rep, "verify-hkt.I.max_residual", imax, "<", 1e-5);
    else check(rep, "verify-hkt.I.min_residual", imin, ">", 1e-2);
    check(rep, "verify-hkt.dH.max", dH, "<", 1e-6);
    check(rep, "verify-hkt.J.third_over_first_two", ratio, "<", 2.0);
    check(rep, "verify-hkt.J.hermiticity", hermJ, "<", 1e-10);
    if (i_hkt) check(rep, "verify-hkt.I.hermiticity", hermI, "<", 1e-10);
    else check(rep, "verify-hkt.I.hermiticity_broken", hermI, ">", 1e-3);
    json d;
    d["parameter_class"] = quat::to_string(cls);
    d["points"] = pts.size();
    d["step"] = fd.step;
    d["richardson"] = fd.richardson;
    d["I_triple"] = i_hkt ? "also HKT" : "not HKT";
    d["general_position"] = sol.general_position;
    rep.details["verify-hkt"] = d.dump();
    rep.sidecars["verify-hkt"] = csv;
}

const char* holonomy_group(ParameterClass c) {
    switch (c) {
        case ParameterClass::Real: return "Sp(2)";
        case ParameterClass::Complex: return "SU(4)";
        case ParameterClass::ImaginaryQuaternion: return "Spin(7)";
        case ParameterClass::Quaternion: return "SO(8)";
    }
    return "?";
}

void holonomy(const RunInput& in, const RunOptions& o, Report& rep) {
    const auto& cfg = in.superposition;
    if (cfg.taus.empty()) {
        rep.warnings.push_back("holonomy: flat configuration, curvature vanishes identically; no classification");
        return;
    }
    const auto cls = brane::parameter_class(cfg);
    exterior::FdOptions fd = geom::kCurvatureFd;
    if (o.step) fd.step = *o.step;
    const geom::Structures S{quat::left_triple(8), quat::right_triple(8), calib::build_cayley(quat::left_triple(8))};
    const auto pts = brane::sample_points(cfg, samples_or(o, 4), o.seed, std::max(kSweepClearance, 10 * fd.step));
    struct Sample {
        int sign;
        geom::CurvatureSample s;
        geom::MembershipReport m;
    };
    std::vector<std::vector<Sample>> per(2 * pts.size());
    parallel_for(per.size(), [&](std::size_t k) {
        const int sign = k % 2 ? +1 : -1;
        for (auto& s : brane::transported_curvature(cfg, sign, pts[k / 2], fd)) {
            auto m = geom::algebra_membership(s.R, s.g, S);
            per[k].push_back({sign, std::move(s), m});
        }
    });
    struct Agg {
        double sp2_I = 0, sp2_J = 0, su4 = 0, spin7 = 0, skew = 0;
        int count = 0, degenerate = 0;
        std::vector<Matrix> Rs;
    } minus, plus;
    std::string csv = csv_row({"sample", "connection", "m", "n", "norm", "sp2_I", "sp2_J", "su4", "spin7"});
    int idx = 0;
    for (const auto& list : per)
        for (const auto& x : list) {
            Agg& a = x.sign < 0 ? minus : plus;
            csv += csv_row({std::to_string(idx++), x.sign < 0 ? "minus" : "plus", std::to_string(x.s.m), std::to_string(x.s.n),
                            num(x.m.norm), num(x.m.sp2_I), num(x.m.sp2_J), num(x.m.su4), num(x.m.spin7)});
            if (x.m.degenerate) {
                ++a.degenerate;
                continue;
            }
            ++a.count;
            a.sp2_I = std::max(a.sp2_I, x.m.sp2_I);
            a.sp2_J = std::max(a.sp2_J, x.m.sp2_J);
            a.su4 = std::max(a.su4, x.m.su4);
            a.spin7 = std::max(a.spin7, x.m.spin7);
            a.skew = std::max(a.skew, geom::skew_residual(x.s));
            a.Rs.push_back(x.s.R);
        }
    check(rep, "holonomy.minus.samples", minus.count, ">", 19);
    check(rep, "holonomy.plus.samples", plus.count, ">", 19);
    const double in_thr = geom::kMemberThreshold, out_thr = geom::kNonMemberThreshold;
    switch (cls) {
        case ParameterClass::Real: check(rep, "holonomy.minus.sp2_I", minus.sp2_I, "<", in_thr); break;
        case ParameterClass::Complex:
            check(rep, "holonomy.minus.su4", minus.su4, "<", in_thr);
            check(rep, "holonomy.minus.sp2_I", minus.sp2_I, ">", out_thr);
            break;
        case ParameterClass::ImaginaryQuaternion:
            check(rep, "holonomy.minus.spin7", minus.spin7, "<", in_thr);
            check(rep, "holonomy.minus.su4", minus.su4, ">", out_thr);
            break;
        case ParameterClass::Quaternion: check(rep, "holonomy.minus.spin7", minus.spin7, ">", out_thr); break;
    }
    check(rep, "holonomy.plus.sp2_J", plus.sp2_J, "<", in_thr);
    check(rep, "holonomy.skew", std::max(minus.skew, plus.skew), "<", 1e-6);
    auto verdicts = [](const Agg& a) {
        json v;
        for (auto [name, r] : {std::pair{"sp2_I", a.sp2_I}, {"sp2_J", a.sp2_J}, {"su4", a.su4}, {"spin7", a.spin7}})
            v[name] = {{"max_residual", r}, {"verdict", geom::to_string(geom::judge(r, a.count == 0))}};
        v["span_dimension"] = geom::span_dimension(a.Rs);
        v["degenerate_samples"] = a.degenerate;
        return v;
    };
    json d;
    d["parameter_class"] = quat::to_string(cls);
    d["expected_holonomy_minus"] = holonomy_group(cls);
    d["expected_holonomy_plus"] = "Sp(2)";
    d["points"] = pts.size();
    d["minus"] = verdicts(minus);
    d["plus"] = verdicts(plus);
    d["transport"] = "curvature carried along rays to |x| = 1000";
    rep.details["holonomy"] = d.dump();
    rep.sidecars["holonomy"] = csv;
}

int expected_dimension(calib::CalibrationKind k) {
    switch (k) {
        case calib::CalibrationKind::MixedIJ: return 1;
        case calib::CalibrationKind::Kahler2PlusPhi: return 2;
        case calib::CalibrationKind::CayleyPlusPhi: return 3;
        case calib::CalibrationKind::PhiJ: return 4;
    }
    return -1;
}

void calibrate(const RunInput& in, const RunOptions& o, Report& rep) {
    std::vector<calib::CalibrationKind> kinds;
    if (o.form) kinds = {*o.form};
    else if (in.form) kinds = {*in.form};
    else
        kinds = {calib::CalibrationKind::MixedIJ, calib::CalibrationKind::Kahler2PlusPhi, calib::CalibrationKind::CayleyPlusPhi,
                 calib::CalibrationKind::PhiJ};
    json d = json::object();
    std::string csv = csv_row({"form", "maximizer", "value"});
    for (auto k : kinds) {
        const std::string name = calib::to_string(k);
        const auto w = calib::build_calibration(k);
        calib::MaximizeOptions mo;
        mo.restarts = o.restarts;
        mo.seed = split_seed(o.seed, static_cast<std::uint64_t>(k));
        auto report = calib::maximize(w, 4, mo);
        int dim = -1;
        try {
            dim = calib::contact_dimension(report);
        } catch (const std::invalid_argument& e) {
            rep.warnings.push_back("calibrate " + name + ": " + e.what());
        }
        report.estimated_dimension = dim;
        const double rnd = calib::random_plane_max(w, samples_or(o, 100000), split_seed(o.seed, 100 + static_cast<std::uint64_t>(k)));
        check(rep, "calibrate." + name + ".optimizer_max_deviation", std::abs(report.max_value - 1.0), "<", 1e-6);
        check(rep, "calibrate." + name + ".random_plane_max", rnd, "<", 1.0 + 1e-9);
        check(rep, "calibrate." + name + ".contact_dimension", dim, "==", expected_dimension(k));
        if (k == calib::CalibrationKind::PhiJ) {
            double inv = 0;
            const auto J = quat::right_triple(8);
            for (const auto& p : report.maximizers) inv = std::max(inv, calib::invariance_residual(p, J));
            check(rep, "calibrate.phi_j.maximizers_J_invariant", inv, "<", 1e-5);
        }
        for (std::size_t i = 0; i < report.maximizers.size(); ++i)
            csv += csv_row({name, std::to_string(i), num(calib::evaluate_on_plane(w, report.maximizers[i]))});
        char fixed[32];
        std::snprintf(fixed, sizeof fixed, "%.6f", report.max_value);
        d[name] = {{"max", report.max_value},
                   {"max_fixed", fixed},
                   {"dimension", dim},
                   {"maximizers", report.maximizers.size()},
                   {"random_plane_max", rnd},
                   {"restarts", report.diagnostics.restarts},
                   {"local_probes", report.diagnostics.local_probes},
                   {"converged", report.diagnostics.converged},
                   {"max_iterations_used", report.diagnostics.max_iterations_used}};
    }
    rep.details["calibrate"] = d.dump();
    rep.sidecars["calibrate"] = csv;
}

void eom(const RunInput& in, const RunOptions& o, Report& rep) {
    const auto& cfg = in.superposition;
    const auto sol = brane::assemble_solution(cfg);
    const double h = o.step.value_or(brane::kEomFd.step);
    const auto pts = brane::sample_points(cfg, samples_or(o, 8), o.seed, std::max(kEomClearance, 10 * h));
    std::vector<std::pair<brane::EomResidual, brane::EomResidual>> res(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
        res[k] = {brane::eom_residual(sol, pts[k], {h, false}), brane::eom_residual(sol, pts[k], {h / 2, false})};
    });
    std::string csv = csv_row({"point", "step", "einstein", "h_field", "dilaton"});
    double mx[3] = {0, 0, 0}, sum[2][3] = {{0, 0, 0}, {0, 0, 0}};
    for (std::size_t k = 0; k < res.size(); ++k) {
        const brane::EomResidual* pair[2] = {&res[k].first, &res[k].second};
        for (int s = 0; s < 2; ++s) {
            const double c[3] = {pair[s]->einstein, pair[s]->h_field, pair[s]->dilaton};
            csv += csv_row({std::to_string(k), num(s ? h / 2 : h), num(c[0]), num(c[1]), num(c[2])});
            for (int i = 0; i < 3; ++i) {
                sum[s][i] += c[i];
                if (s == 0) mx[i] = std::max(mx[i], c[i]);
            }
        }
    }
    const char* names[3] = {"einstein", "h_field", "dilaton"};
    json d;
    for (int i = 0; i < 3; ++i) {
        check(rep, std::string("eom.") + names[i] + ".max", mx[i], "<", 1e-4);
        if (sum[0][i] > 1e-10 * std::max<std::size_t>(1, pts.size())) {
            const double order = std::log2(sum[0][i] / sum[1][i]);
            check(rep, std::string("eom.") + names[i] + ".order_deviation", std::abs(order - 2.0), "<", 0.3);
            d[names[i]] = {{"max", mx[i]}, {"order", order}};
        } else {
            d[names[i]] = {{"max", mx[i]}, {"order", "n/a (residual at roundoff)"}};
        }
    }
    d["step"] = h;
    d["points"] = pts.size();
    rep.details["eom"] = d.dump();
    rep.sidecars["eom"] = csv;
}

void charges(const RunInput& in, const RunOptions& o, Report& rep) {
    if (!in.mbrane) {
        rep.warnings.push_back("charges: no mbrane entry in the config; nothing to compute");
        return;
    }
    const auto sol = brane::m_brane(in.mbrane->kind, in.mbrane->q);
    const int d = sol.transverse_dim;
    const exterior::FdOptions fd{o.step.value_or(1e-4), true};
    const auto pts = brane::sample_points(d, -2.0, 2.0, samples_or(o, 50), o.seed, [](const Vector& y) { return y.norm(); },
                                          std::max(0.3, 10 * fd.step));
    std::vector<double> dF(pts.size()), ddp(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
        dF[k] = exterior::exterior_derivative(sol.flux, pts[k], fd).max_abs();
        ddp[k] = exterior::exterior_derivative(sol.potential_gradient, pts[k], fd).max_abs();
    });
    check(rep, "charges.dF.max", *std::max_element(dF.begin(), dF.end()), "<", 1e-6);
    json det;
    det["kind"] = brane::to_string(sol.kind);
    det["q"] = sol.q;
    if (sol.kind == brane::MKind::M2) {
        check(rep, "charges.d_dhinv.max", *std::max_element(ddp.begin(), ddp.end()), "<", 1e-6);
        rep.warnings.push_back("charges: the M-2 charge integral needs a gauge potential and is not computed");
        det["flux"] = "transverse dual -1/2 *dh on R^8; charge deferred";
    } else {
        const auto f1 = brane::flux_charge(sol, 1.0);
        const auto f5 = brane::flux_charge(sol, 5.0);
        const auto f3 = brane::flux_charge(brane::m_brane(sol.kind, 3 * sol.q), 1.0);
        check(rep, "charges.radius_independence", std::abs(f5.integral / f1.integral - 1.0), "<", 0.01);
        check(rep, "charges.linearity", std::abs(f3.integral / (3 * f1.integral) - 1.0), "<", 1e-3);
        det["integral"] = f1.integral;
        det["normalization"] = f1.normalization;
        det["normalization_note"] = "integral of F = -1/2 *dh over S^4 equals 4 pi^2 q5";
        det["charge"] = f1.charge;
        det["integral_R5"] = f5.integral;
        det["quadrature_error"] = f1.error_estimate;
    }
    rep.details["charges"] = det.dump();
    std::string csv = csv_row({"point", "radius", "dF", "d_dhinv"});
    for (std::size_t k = 0; k < pts.size(); ++k) csv += csv_row({std::to_string(k), num(pts[k].norm()), num(dF[k]), num(ddp[k])});
    rep.sidecars["charges"] = csv;
}

void tau_class(const RunInput& in, const RunOptions&, Report& rep) {
    const auto& cfg = in.superposition;
    json d;
    d["config_class"] = quat::to_string(brane::parameter_class(cfg));
    json list = json::array();
    for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
        const auto& t = cfg.taus[i];
        brane::SuperpositionConfig one;
        one.taus = {t};
        const auto cls = brane::parameter_class(one);
        const auto kind = calib::matching_calibration(cls);
        const double v = calib::evaluate_on_plane(calib::build_calibration(kind), brane::kernel_plane(t));
        check(rep, "tau-class." + std::to_string(i) + ".kernel_calibrated", std::abs(v - 1.0), "<", 1e-9);
        const Quaternion c = t.p1.conj() * t.p2;
        list.push_back({{"product", {c.w, c.x, c.y, c.z}}, {"class", quat::to_string(cls)}, {"form", calib::to_string(kind)}, {"kernel_value", v}});
    }
    d["taus"] = list;
    rep.details["tau-class"] = d.dump();
}

using Command = void (*)(const RunInput&, const RunOptions&, Report&);

Command lookup(const std::string& name) {
    if (name == "verify-hkt") return verify_hkt;
    if (name == "holonomy") return holonomy;
    if (name == "calibrate") return calibrate;
    if (name == "eom") return eom;
    if (name == "charges") return charges;
    if (name == "tau-class") return tau_class;
    return nullptr;
}

void run_one(const std::string& name, const RunInput& in, const RunOptions& o, Report& rep) {
    try {
        lookup(name)(in, o, rep);
    } catch (const std::exception& e) {
        rep.warnings.push_back(name + ": aborted: " + e.what());
        rep.checks.push_back({name + ".completed", 0, 1, "==", false});
    }
}

}  // namespace

Report run(const std::string& command, const RunInput& input, const RunOptions& opts) {
    Report rep;
    rep.command = command;
    rep.seed = opts.seed;
    rep.warnings = input.warnings;
    if (command == "report") {
        for (const auto& c : kCommands)
            if (c != "report") run_one(c, input, opts, rep);
    } else if (lookup(command)) {
        run_one(command, input, opts, rep);
    } else {
        throw std::invalid_argument("unknown command '" + command + "'");
    }
    return rep;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Brane geometry verification: HKT residuals, holonomy, calibrations, field equations, charges"};
    std::string command, config_path, out_path, form;
    double step = 0;
    std::uint64_t seed = 1;
    int samples = 0, restarts = 256;
    app.add_option("command", command, "verify-hkt | holonomy | calibrate | eom | charges | tau-class | report")->required();
    app.add_option("--config", config_path, "config file (JSON)")->required();
    auto* step_opt = app.add_option("--step", step, "finite-difference step for every check");
    app.add_option("--seed", seed, "seed for all sampling");
    auto* samples_opt = app.add_option("--samples", samples, "sample points (random planes for calibrate)");
    app.add_option("--out", out_path, "report path; CSV sidecars are written next to it");
    app.add_option("--restarts", restarts, "optimizer restarts for calibrate");
    auto* form_opt = app.add_option("--form", form, "calibration form: mixed_ij | kahler2_phi | cayley_phi | phi_j");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        std::cerr << "unknown command '" << command << "'\n";
        return kExitConfigError;
    }
    RunInput input;
    RunOptions opts;
    try {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot open config file '" + config_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        input = parse_config(ss.str());
        if (*step_opt) {
            if (!(step > 0)) throw ConfigError("--step must be positive");
            opts.step = step;
        }
        if (*samples_opt) {
            if (samples <= 0) throw ConfigError("--samples must be positive");
            opts.samples = samples;
        }
        if (restarts <= 0) throw ConfigError("--restarts must be positive");
        opts.restarts = restarts;
        if (*form_opt) {
            std::transform(form.begin(), form.end(), form.begin(), [](unsigned char c) { return std::tolower(c); });
            opts.form = calib::parse_kind(form);
            if (!opts.form) throw ConfigError("--form: unknown calibration '" + form + "'");
        }
        opts.seed = seed;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    const Report rep = run(command, input, opts);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& c : rep.checks)
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << num(c.value) << " (" << c.relation << " "
                  << num(c.threshold) << ")\n";
    const std::string text = rep.to_json();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        out << text;
        std::string stem = out_path;
        if (auto dot = stem.rfind(".json"); dot != std::string::npos && dot + 5 == stem.size()) stem.resize(dot);
        for (const auto& [name, csv] : rep.sidecars) std::ofstream(stem + "." + name + ".csv") << csv;
    }
    return rep.passed() ? kExitPass : kExitCheckFailure;
}

}  // namespace hkt::cli
