#pragma once

/**
 * @file serialize.hpp
 * @brief JSON text form of test functions.
 *
 *   {"p":2,"n":1,"terms":[{"re":"1","im":"0","center":["0"],"radius_exp":0}]}
 *
 * Rationals are lowest-terms strings ("a" or "a/b"). Inexact coefficients
 * are written as the exact rational value of their doubles, so a round trip
 * is pointwise lossless.
 */

#include "schwartz.hpp"

#include <json.hpp>

#include <regex>

namespace padic {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw std::domain_error("cannot serialize a non-finite coefficient");
    Rational q(x);
    q.canonicalize();
    return q;
}

inline Rational parse_rational(const std::string& s) {
    static const std::regex pattern(R"(-?[0-9]+(/[0-9]+)?)");
    if (!std::regex_match(s, pattern)) throw ParseError("malformed rational \"" + s + "\"");
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("malformed rational \"" + s + "\"");
    if (q.get_den() == 0) throw ParseError("zero denominator in \"" + s + "\"");
    q.canonicalize();
    return q;
}

inline nlohmann::ordered_json to_json(const BruhatSchwartzFunction& f) {
    nlohmann::ordered_json j;
    j["p"] = f.context().p();
    j["n"] = f.context().n();
    auto terms = nlohmann::ordered_json::array();
    for (const auto& t : f.terms()) {
        nlohmann::ordered_json tj;
        if (t.coef.is_exact()) {
            tj["re"] = to_string(t.coef.re_exact());
            tj["im"] = to_string(t.coef.im_exact());
        } else {
            tj["re"] = to_string(exact_rational(t.coef.value().real()));
            tj["im"] = to_string(exact_rational(t.coef.value().imag()));
        }
        auto center = nlohmann::ordered_json::array();
        for (const auto& c : t.ball.center_coords()) center.push_back(to_string(c));
        tj["center"] = std::move(center);
        tj["radius_exp"] = t.ball.radius_exp();
        terms.push_back(std::move(tj));
    }
    j["terms"] = std::move(terms);
    return j;
}

inline std::string serialize(const BruhatSchwartzFunction& f) { return to_json(f).dump(); }

inline BruhatSchwartzFunction from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ParseError("expected a JSON object");
        for (const char* key : {"p", "n", "terms"}) {
            if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
        }
        if (!j["p"].is_number_integer() || !j["n"].is_number_integer()) {
            throw ParseError("\"p\" and \"n\" must be integers");
        }
        const auto p = j["p"].get<long>();
        const auto n = j["n"].get<long>();
        if (n < 1 || n > 64) throw ParseError("dimension n out of range");
        PrimeContext ctx(p, static_cast<int>(n));
        if (!j["terms"].is_array()) throw ParseError("\"terms\" must be an array");
        std::vector<Term> terms;
        for (const auto& tj : j["terms"]) {
            if (!tj.is_object()) throw ParseError("term must be an object");
            for (const char* key : {"re", "im", "center", "radius_exp"}) {
                if (!tj.contains(key)) throw ParseError(std::string("term missing key \"") + key + "\"");
            }
            if (!tj["re"].is_string() || !tj["im"].is_string()) throw ParseError("re/im must be strings");
            if (!tj["radius_exp"].is_number_integer()) throw ParseError("radius_exp must be an integer");
            const auto& cj = tj["center"];
            if (!cj.is_array() || cj.size() != static_cast<size_t>(n)) {
                throw ParseError("center must be an array of n rationals");
            }
            std::vector<Rational> c;
            for (const auto& x : cj) {
                if (!x.is_string()) throw ParseError("center entries must be strings");
                c.push_back(parse_rational(x.get<std::string>()));
            }
            terms.push_back({Coefficient(parse_rational(tj["re"].get<std::string>()),
                                         parse_rational(tj["im"].get<std::string>())),
                             Ball(PAdicVector(std::move(c), ctx), tj["radius_exp"].get<long>())});
        }
        return canonicalize(BruhatSchwartzFunction(ctx, std::move(terms)));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

inline BruhatSchwartzFunction deserialize(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
}

}  // namespace padic
