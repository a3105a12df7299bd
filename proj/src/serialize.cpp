#include "lab/serialize.hpp"

namespace ergolab {

using nlohmann::json;

json to_json(const CircleArc& arc) {
    if (arc.full) return json{{"start_decimal_string", "0."}, {"length_decimal_string", "1."}};
    return json{{"start_decimal_string", arc.start.to_decimal(40)},
                {"length_decimal_string", CirclePoint{arc.length_bits}.to_decimal(40)}};
}

json to_json(const LevelSet& ls) {
    json arcs = json::array();
    for (const auto& a : ls.arcs) arcs.push_back(to_json(a));
    return json{{"lambda", ls.lambda},
                {"arcs", arcs},
                {"inner_measure", ls.inner_measure},
                {"outer_measure", ls.outer_measure},
                {"grid_cells", ls.grid_cells}};
}

json to_json(const DecompositionResult& d) {
    json arcs = json::array();
    for (const auto& a : d.s_arcs) arcs.push_back(to_json(a));
    return json{{"a_values", d.a_values},
                {"s_arcs", arcs},
                {"union_measure", d.union_measure},
                {"symdiff_vs_levelset", d.symdiff_vs_levelset},
                {"degenerate", d.degenerate}};
}

json to_json(const WitnessResult& w) {
    return json{{"subsequence", w.subsequence},
                {"r_k", w.r_k},
                {"epsilon", w.epsilon},
                {"eta", w.eta},
                {"beta", w.beta},
                {"certified_arc", to_json(w.certified_arc)},
                {"certified_measure", w.certified_measure},
                {"min_average_on_arc", w.min_average_on_arc}};
}

json to_json(const CriterionReport& r) {
    return json{{"classification", to_string(r.classification)},
                {"rationale", r.rationale},
                {"terms", r.terms},
                {"partial_sums", r.partial_sums}};
}

json to_json(const StageReport& r) {
    return json{{"k", r.k},
                {"l_k", r.l_k},
                {"d_k", r.d_k},
                {"lhs_min", r.lower_bound_lhs},
                {"rhs", r.lower_bound_rhs},
                {"samples", r.sample_points_checked},
                {"passed", r.passed},
                {"witness_certified_measure", r.witness_certified_measure},
                {"witness_min_average", r.witness_min_average}};
}

json to_json(const WeakScanResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(json{{"lambda", row.lambda},
                            {"measure", row.measure},
                            {"integral", row.integral},
                            {"integral_resolved", row.integral_resolved},
                            {"empirical_c", row.empirical_c}});
    }
    return json{{"rows", rows}, {"max_c", r.max_c}};
}

}  // namespace ergolab
