#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lifeline/archimedean.hpp"
#include "lifeline/families.hpp"
#include "lifeline/loadsharing.hpp"

namespace lifeline {

// Model files are single JSON objects with the envelope
//     { "type": <string>, "r": <int>, ... }
// and a strict schema: every key must be recognized for the given type, and
// every required key must be present.  Seven types are accepted:
//
//   "odthls"             {"rates": {"<prefix>": {"<unit>": rate, ...}, ...}}
//                        Prefix keys are comma-joined 1-based failure
//                        histories in order ("" for no failures yet, "2,1"
//                        for unit 2 then unit 1).  Every prefix of length
//                        0..r-1 must appear, each listing one positive rate
//                        per surviving unit.
//
//   "thls"               Same shape, but keys are failed *sets* written in
//                        increasing order ("1,3"); the rates may not depend
//                        on the failure order, so each set entry is expanded
//                        to all of its orderings.
//
//   "exchangeable_thls"  {"L": [L(r), L(r-1), ..., L(1)]} - per-stage total
//                        failure rates indexed by the number of failures so
//                        far, all positive.
//
//   "archimedean"        {"family": "power_ratio"|"log"|"tabulated_delta",
//                         ...family parameters..., "marginal": <optional>}
//                        power_ratio takes "alpha" > 0 and "beta" >= 1;
//                        log (independence) takes nothing; tabulated_delta
//                        takes "grid"/"values" sampling the top diagonal
//                        delta_r on [0,1], from which the generator is
//                        recovered numerically (notes record convergence).
//
//   "schur_constant"     {"family": "power_ratio" (alpha, beta) |
//                         "exponential" (rate) | "tabulated" (grid, values)}
//                        The family gives the marginal survival Gbar, and
//                        the diagonals are delta_l(u) = Gbar(l Gbar^{-1}(u)).
//
//   "orderstats"         {"grid": [t...], "values": [[Gbar_{1:r}...], ...,
//                         [Gbar_{r:r}...]]} - r curves tabulated on one
//                        shared increasing time grid starting at 0.
//
//   "diagonals"          {"grid": [u...], "values": [[delta_2...], ...,
//                         [delta_r...]], "marginal": <optional>} - r-1
//                        curves on one increasing unit-interval grid
//                        containing 0 and 1.
//
// The optional "marginal" object is {"kind": "exponential", "rate": x},
// {"kind": "power_ratio", "alpha": a, "beta": b} for (t^b + 1)^{-a}, or
// {"kind": "tabulated", "grid": [...], "values": [...]}.
//
// Tabulated curves are interpolated by the shape-preserving monotone cubic
// of TabulatedFunction and re-validated by the owning family class, so a
// file that decodes successfully already satisfies the family invariants.

struct LoadedModel {
    std::string type;  // discriminant exactly as written in the file
    int r = 0;

    // Engaged members depend on the type; see the table above.
    std::optional<OdThlsSpec> odthls;          // odthls | thls
    std::optional<ExThlsModel> exthls;         // exchangeable_thls
    std::optional<GeneratorSpec> generator;    // archimedean
    std::optional<MarginalSurvival> marginal;  // exchangeable_thls | schur_constant |
                                               // orderstats | optional attachments
    std::optional<DiagonalFamily> diagonals;   // archimedean | schur_constant | diagonals |
                                               // exchangeable_thls
    std::optional<OrderStatFamily> orderstats; // orderstats | exchangeable_thls
    std::vector<std::string> notes;            // loader diagnostics (e.g. recovery residual)

    // The rate table, materializing it from the exchangeable form when
    // needed; throws ContractError when the type has no such table.
    OdThlsSpec rate_table() const;
};

// Decode a model from JSON text / from a file on disk.  Schema violations
// throw DomainError naming the offending key; values that decode but break
// a family invariant propagate the family's ContractError.
LoadedModel load_model_json(const std::string& text);
LoadedModel load_model_file(const std::string& path);

// Serialize an explicit rate table as an "odthls" model file (the output
// format of the model generator).
std::string odthls_to_json(const OdThlsSpec& spec);

// Serialize an exchangeable model as an "exchangeable_thls" file.
std::string exthls_to_json(const ExThlsModel& model);

// Canonical compact re-serialization of a model file's JSON text (keys
// sorted, no whitespace).  Used to fingerprint the model a sample batch was
// drawn from, so mismatched gof comparisons fail loudly.
std::string canonical_model_fingerprint(const std::string& text);

} // namespace lifeline
