#pragma once

#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "reglab/report.hpp"
#include "reglab/stark.hpp"

namespace reglab {

struct StarkConfig {
    int D = -4;
    std::string modulus = "3";
    int phi_fin_index = 0;
    std::vector<long long> chi_exponents = {1};
    std::vector<std::string> twist_primes = {"2+i", "2-i"};
    std::string Omega = "1";
    std::string symbol_source = "auto";
    EvalSettings settings;
    long long max_den = 10000;
    double recog_tol = 1e-6;
    std::uint64_t seed = 0;

    static StarkConfig from_json(const Json& j) {
        StarkConfig c;
        auto need = [&](const char* key) {
            if (!j.contains(key)) throw BadConfig(std::string("missing config field: ") + key);
        };
        need("D");
        need("modulus");
        need("phi_fin_index");
        need("chi_exponents");
        need("twist_primes");
        c.D = j["D"].get<int>();
        c.modulus = j["modulus"].get<std::string>();
        c.phi_fin_index = j["phi_fin_index"].get<int>();
        c.chi_exponents = j["chi_exponents"].get<std::vector<long long>>();
        c.twist_primes = j["twist_primes"].get<std::vector<std::string>>();
        if (j.contains("Omega")) c.Omega = j["Omega"].get<std::string>();
        if (j.contains("symbol_source")) c.symbol_source = j["symbol_source"].get<std::string>();
        if (j.contains("settings")) apply_settings_json(j["settings"], c.settings);
        if (j.contains("max_den")) c.max_den = j["max_den"].get<long long>();
        if (j.contains("recog_tol"))
            c.recog_tol = j["recog_tol"].is_string()
                              ? std::stod(j["recog_tol"].get<std::string>())
                              : j["recog_tol"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        return c;
    }

    Json to_json() const {
        Json j;
        j["D"] = D;
        j["modulus"] = modulus;
        j["phi_fin_index"] = phi_fin_index;
        j["chi_exponents"] = chi_exponents;
        j["twist_primes"] = twist_primes;
        j["Omega"] = Omega;
        j["symbol_source"] = symbol_source;
        j["settings"] = settings_json(settings);
        j["max_den"] = max_den;
        j["recog_tol"] = fmt_double(recog_tol);
        j["seed"] = seed;
        return j;
    }
};

struct StarkReport {
    StarkConfig config;
    std::string config_hash;
    std::vector<long long> ray_class_orders;
    std::vector<std::string> class_representatives;
    std::vector<cplx> chi_values;
    cplx pi_plus, pi_minus;
    std::vector<CMatrix> blocks;
    cplx R_value{0, 0}, c_value{0, 0}, A_value{0, 0}, A_conj{0, 0};
    cplx half_conjphi{0, 0}, half_phi{0, 0};
    double resid_dedekind = 0, resid_minkowski = 0, resid_conj_A = 0;
    double resid_twist_plus = 0, resid_twist_minus = 0;
    double resid_block_conj = 0;
    RecognitionResult recog_re, recog_im;

    Json to_json() const {
        Json j;
        j["tool"] = kToolVersion;
        j["config"] = config.to_json();
        j["config_hash"] = config_hash;
        j["seed"] = config.seed;
        j["ray_class_orders"] = ray_class_orders;
        j["class_representatives"] = class_representatives;
        Json chis = Json::array();
        for (auto& v : chi_values) chis.push_back(reglab::to_json(v));
        j["chi_values"] = chis;
        j["pi_plus"] = reglab::to_json(pi_plus);
        j["pi_minus"] = reglab::to_json(pi_minus);
        Json bl = Json::array();
        for (auto& b : blocks) bl.push_back(reglab::to_json(b));
        j["blocks_per_tau"] = bl;
        j["R"] = reglab::to_json(R_value);
        j["c"] = reglab::to_json(c_value);
        j["A"] = reglab::to_json(A_value);
        j["A_conj_chi"] = reglab::to_json(A_conj);
        j["L_deriv_half_conjphi"] = reglab::to_json(half_conjphi);
        j["L_deriv_half_phi"] = reglab::to_json(half_phi);
        Json res;
        res["dedekind_dual_route"] = fmt_double(resid_dedekind);
        res["minkowski_conjugation"] = fmt_double(resid_minkowski);
        res["block_conjugate_columns"] = fmt_double(resid_block_conj);
        res["twist_identity_plus"] = fmt_double(resid_twist_plus);
        res["twist_identity_minus"] = fmt_double(resid_twist_minus);
        res["A_conjugation_symmetry"] = fmt_double(resid_conj_A);
        j["residuals"] = res;
        auto rec = [](const RecognitionResult& r) {
            return Json{{"kind", r.kind},
                        {"p", r.p},
                        {"q", r.q},
                        {"residual", fmt_double(r.residual)}};
        };
        j["recognition_A_real"] = rec(recog_re);
        j["recognition_A_imag_over_sqrtD"] = rec(recog_im);
        j["assumptions"] = Json::array(
            {"modulus divisibility by the conductors of chi and of the Hecke character "
             "is assumed, not verified",
             "recognition outcomes are data; the symbol normalization is canonical only "
             "up to a rational factor"});
        return j;
    }
};

namespace detail {

// CM multiplication matrix of a ring element on the basis (1, w).
inline IntMat2 cm_matrix(const ImagQuadField& K, const QuadInt& alpha) {
    IntMat2 m;
    // alpha * 1 = x + y w
    m.m[0][0] = alpha.x;
    m.m[1][0] = alpha.y;
    // alpha * w
    QuadInt aw = K.mul(alpha, QuadInt{0, 1});
    m.m[0][1] = aw.x;
    m.m[1][1] = aw.y;
    return m;
}

inline TorsionCoord torsion_point(const ImagQuadField& K, const QuadInt& numer,
                                  const QuadInt& denom) {
    // numer / denom = numer * conj(denom) / N(denom), coordinates in (1, w)
    QuadInt top = K.mul(numer, K.conj(denom));
    long long N = K.norm(denom);
    return TorsionCoord(Rat(top.x, N), Rat(top.y, N));
}

inline TorsionDivisor point_minus_negation(const TorsionCoord& p) {
    TorsionDivisor d;
    d.add(p, 1);
    d.add(p.negated(), -1);
    return d;
}

inline cplx parse_complex(const std::string& s) {
    // decimal "a", "a+bi", "bi"
    std::string t;
    for (char c : s)
        if (!isspace((unsigned char)c)) t += c;
    if (t.empty()) throw BadConfig("empty complex literal");
    try {
        double re = 0, im = 0;
        if (t.back() == 'i' || t.back() == 'I') {
            std::size_t split = std::string::npos;
            for (std::size_t i = 1; i + 1 < t.size(); ++i)
                if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E')
                    split = i;
            if (split == std::string::npos) {
                std::string coef = t.substr(0, t.size() - 1);
                im = (coef.empty() || coef == "+") ? 1.0
                                                   : (coef == "-" ? -1.0 : std::stod(coef));
            } else {
                re = std::stod(t.substr(0, split));
                std::string coef = t.substr(split, t.size() - 1 - split);
                im = (coef == "+") ? 1.0 : (coef == "-" ? -1.0 : std::stod(coef));
            }
        } else {
            re = std::stod(t);
        }
        return {re, im};
    } catch (const std::invalid_argument&) {
        throw BadConfig("malformed complex literal: " + s);
    } catch (const std::out_of_range&) {
        throw BadConfig("complex literal out of range: " + s);
    }
}

inline TorsionDivisor divisor_from_json(const Json& arr) {
    TorsionDivisor d;
    for (auto& e : arr) {
        Rat a = Rat::parse(e.at("a").get<std::string>());
        Rat b = Rat::parse(e.at("b").get<std::string>());
        d.add(TorsionCoord(a, b), e.at("mult").get<long long>());
    }
    return d;
}

} // namespace detail

// Full K = Q(sqrt(D)), modulus-g Stark run: symbols on twisted torsion,
// regulator determinant, leading L coefficient, ratio, recognition.
inline StarkReport run_stark_pipeline(const StarkConfig& config) {
    StarkReport rep;
    rep.config = config;
    rep.config_hash = std::to_string(fnv1a(config.to_json().dump()));
    std::string stage = "setup";
    try {
        config.settings.validate();
        ImagQuadField K(config.D);
        QuadInt g = K.parse(config.modulus);
        cplx Omega = detail::parse_complex(config.Omega);
        if (std::abs(Omega) == 0.0) throw BadConfig("Omega must be nonzero");

        stage = "ray_class_group";
        auto rc = std::make_shared<RayClassGroupData>(ray_class_group(K, g));
        const FiniteAbelianGroup& grp = rc->group();
        rep.ray_class_orders = grp.orders;
        if (config.chi_exponents.size() != grp.rank())
            throw BadConfig("chi_exponents must have one entry per cyclic factor (" +
                            std::to_string(grp.rank()) + ")");

        stage = "hecke_character";
        auto chars = hecke_characters(K, g, rc);
        if (config.phi_fin_index < 0 || config.phi_fin_index >= (int)chars.size())
            throw BadConfig("phi_fin_index out of range; " + std::to_string(chars.size()) +
                            " admissible finite characters");
        const HeckeCharData& phi = chars[(std::size_t)config.phi_fin_index];

        CharacterData chi;
        chi.orders = grp.orders;
        chi.exponents = config.chi_exponents;

        stage = "twist";
        if (config.twist_primes.size() != 2)
            throw BadConfig("need exactly two twist primes");
        QuadInt pplus = K.parse(config.twist_primes[0]);
        QuadInt pminus = K.parse(config.twist_primes[1]);
        rep.pi_plus = twist_factor(phi, chi, pplus);
        rep.pi_minus = twist_factor(phi, chi, pminus);
        if (std::abs(rep.pi_plus) < 1e-12 || std::abs(rep.pi_minus) < 1e-12)
            throw Error("twist", "degenerate twist factor (pi = 0)");

        stage = "galois_data";
        std::vector<GaloisElt> galois;
        std::vector<QuadInt> reps;
        for (long long t = 0; t < grp.size(); ++t) {
            QuadInt r = rc->class_representative(grp.element(t));
            // the CM action must be invertible on the twisted torsion too:
            // adjust within the congruence class mod g until the
            // representative is coprime to both twist primes
            QuadInt adj = r;
            bool ok = !K.divides(pplus, adj) && !K.divides(pminus, adj);
            for (long long trial = 1; !ok && trial < 4096; ++trial) {
                QuadInt shift{trial % 64 - 32, trial / 64 - 32};
                adj = K.add(r, K.mul(g, shift));
                ok = !adj.is_zero() && !K.divides(pplus, adj) && !K.divides(pminus, adj);
            }
            if (!ok) throw Error("galois_data", "no representative coprime to the twists");
            reps.push_back(adj);
            rep.class_representatives.push_back(K.print(adj));
            GaloisElt ge;
            ge.cm_matrix = detail::cm_matrix(K, adj);
            ge.phase = std::conj(phi.phi_fin_value(adj));
            galois.push_back(ge);
            rep.chi_values.push_back(chi.value(grp.element(t)));
        }

        stage = "symbols";
        SymbolDivisorData xi_plus, xi_minus, xi_base;
        QuadInt gp = K.mul(g, pplus), gm = K.mul(g, pminus);
        xi_base = SymbolDivisorData::from_convolution(
            detail::point_minus_negation(detail::torsion_point(K, QuadInt{1, 0}, g)));
        if (config.symbol_source == "auto") {
            auto lift_symbol = [&](const QuadInt& gtw) {
                RayClassGroupData rct = ray_class_group(K, gtw);
                TorsionDivisor div;
                for (long long t = 0; t < rct.group().size(); ++t) {
                    QuadInt r = rct.class_representative(rct.group().element(t));
                    if (grp.index_of(artin_symbol(r, *rc)) != 0) continue; // keep identity fibre
                    // adjust by a unit so the representative is 1 mod g
                    QuadInt adjusted = r;
                    bool found = false;
                    for (auto& u : K.units()) {
                        QuadInt cand = K.mul(r, u);
                        if (rc->ring->reduce(cand) == rc->ring->reduce(QuadInt{1, 0})) {
                            adjusted = cand;
                            found = true;
                            break;
                        }
                    }
                    if (!found)
                        throw Error("symbols", "no unit-adjusted lift congruent to 1");
                    TorsionDivisor one =
                        detail::point_minus_negation(detail::torsion_point(K, adjusted, gtw));
                    div = div + one;
                }
                return SymbolDivisorData::from_convolution(div);
            };
            xi_plus = lift_symbol(gp);
            xi_minus = lift_symbol(gm);
        } else {
            std::ifstream in(config.symbol_source);
            if (!in) throw BadConfig("cannot open symbol file " + config.symbol_source);
            Json j = Json::parse(in);
            xi_plus = SymbolDivisorData::from_convolution(
                detail::divisor_from_json(j.at("xi_plus")));
            xi_minus = SymbolDivisorData::from_convolution(
                detail::divisor_from_json(j.at("xi_minus")));
        }

        stage = "blocks";
        ComplexLattice lat = make_lattice(Omega, Omega * K.embed_w());
        EmbeddingFamily fam;
        fam.tag = EmbeddingFamily::Case::Big;
        EmbeddingSpec phi1{"Phi1", lat, "Phi1bar", true};
        EmbeddingSpec phi1b{"Phi1bar", conjugate_lattice(lat), "Phi1", false};
        fam.embeddings = {phi1, phi1b};
        RegulatorBlocks blocks =
            build_blocks({xi_plus}, {xi_minus}, fam, galois, config.settings);
        rep.blocks = blocks.per_tau;
        rep.resid_block_conj = blocks.conjugate_column_residual();

        // non-tautological conjugate-embedding audit on the plus symbol
        {
            TorsionDivisor conj_div;
            for (auto& [p, m] : xi_plus.convolution.entries)
                conj_div.add(TorsionCoord(p.a, -p.b), m);
            SymbolDivisorData conj_sym = SymbolDivisorData::from_convolution(conj_div);
            cplx direct = regulator_at_embedding(conj_sym, conjugate_lattice(lat),
                                                 config.settings);
            cplx via_conj = std::conj(
                regulator_at_embedding(xi_plus, lat, config.settings));
            rep.resid_minkowski = std::abs(direct - via_conj);
        }

        stage = "stark_regulator";
        rep.R_value = stark_regulator_case_big(rep.chi_values, blocks, config.D);

        // twisted-column identity: sum_tau chi reg(xi_pm) = pi_pm / conj(p_pm)
        // times the same sum for the base symbol
        {
            cplx rho_plus = 0, rho_minus = 0, rho_base = 0;
            for (std::size_t t = 0; t < galois.size(); ++t) {
                rho_plus += rep.chi_values[t] * blocks.per_tau[t][0][0];
                rho_minus += rep.chi_values[t] * blocks.per_tau[t][1][0];
                SymbolDivisorData sb = galois_act(xi_base, galois[t].cm_matrix);
                rho_base += rep.chi_values[t] * galois[t].phase *
                            regulator_at_embedding(sb, lat, config.settings);
            }
            rep.resid_twist_plus =
                std::abs(rho_plus - rep.pi_plus / std::conj(K.embed(pplus)) * rho_base);
            rep.resid_twist_minus =
                std::abs(rho_minus - rep.pi_minus / std::conj(K.embed(pminus)) * rho_base);
        }

        stage = "leading_coefficient";
        LeadingCoefficient lc = leading_coefficient(chi, phi, *rc, config.settings);
        rep.c_value = lc.value;
        rep.half_conjphi = lc.half_conjphi;
        rep.half_phi = lc.half_phi;
        rep.resid_dedekind = lc.dedekind_residual;
        if (std::abs(rep.c_value) < 1e-15)
            throw Error("leading_coefficient", "c(E, chi) vanishes");

        stage = "ratio";
        rep.A_value = rep.R_value / rep.c_value;

        stage = "conjugate_run";
        CharacterData chibar = chi.conjugated();
        std::vector<cplx> chibar_values;
        for (long long t = 0; t < grp.size(); ++t)
            chibar_values.push_back(chibar.value(grp.element(t)));
        cplx Rbar = stark_regulator_case_big(chibar_values, blocks, config.D);
        LeadingCoefficient lcbar = leading_coefficient(chibar, phi, *rc, config.settings);
        rep.A_conj = Rbar / lcbar.value;
        rep.resid_conj_A = std::abs(rep.A_conj - std::conj(rep.A_value));

        stage = "recognition";
        rep.recog_re = recognize_real(rep.A_value.real(), config.D, config.max_den,
                                      config.recog_tol);
        double sD = std::sqrt(double(std::abs(config.D)));
        if (auto pq = recognize_rational(rep.A_value.imag() / sD, config.max_den,
                                         config.recog_tol)) {
            rep.recog_im.kind = "rational";
            rep.recog_im.p = pq->first;
            rep.recog_im.q = pq->second;
            rep.recog_im.residual =
                std::abs(rep.A_value.imag() / sD - double(pq->first) / double(pq->second));
        }
        return rep;
    } catch (Error& e) {
        throw Error("stark_pipeline/" + stage, e.what());
    }
}

} // namespace reglab
