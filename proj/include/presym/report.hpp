#pragma once

#include <json.hpp>  // vendored single-header nlohmann/json

#include "presym/model.hpp"

namespace presym {

using Json = nlohmann::ordered_json;

struct VerifyRow {
    std::string check;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

// The full invariant battery over a model: closedness, constant rank,
// locally-Hamiltonian generators, structure constants, theta exactness,
// momentum defining identity, Poissonian verdict, level-set regularity,
// Pfaff check, Assumption-2 certificate, kernel symmetries.
VerifyReport run_verify(const Model& model, std::uint64_t seed = 0);

// Same battery but construction failures (non-closed omega, rank drop, bad
// model text) become failing rows instead of exceptions.
VerifyReport run_verify_text(const std::string& model_text, std::uint64_t seed = 0);

// deterministic on-level base point (sampler-driven)
std::map<int, Rational> pick_base_point(const PresympSystem& sys, const ConstraintSet& level,
                                        const OnSetSampler& sampler, std::uint64_t seed);

std::string render_text(const StabilizationReport& rep, const std::string& model_name);
Json render_json(const StabilizationReport& rep, const std::string& model_name,
                 std::uint64_t seed);

std::string render_text(const ReducedSpace& red, const std::string& model_name,
                        const std::string& route);
Json render_json(const ReducedSpace& red, const std::string& model_name,
                 const std::string& route, std::uint64_t seed);

std::string render_text(const RouteReport& rep, const std::string& model_name);
Json render_json(const RouteReport& rep, const std::string& model_name, std::uint64_t seed);

std::string render_text(const VerifyReport& rep, const std::string& model_name);
Json render_json(const VerifyReport& rep, const std::string& model_name, std::uint64_t seed);

std::string point_to_string(const Chart::Ptr& chart, const std::map<int, Rational>& pt);

}  // namespace presym
