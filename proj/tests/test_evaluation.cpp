#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "rate/evaluation.hpp"
#include "rate/rng.hpp"
#include "rate/scoring.hpp"
#include "rate/triple_store.hpp"

using namespace rate;
using Catch::Approx;

namespace {

TripleStore store_from(const std::string& text) {
    std::istringstream in(text);
    return load_triples(in);
}

TripleStore random_store(std::mt19937_64& rng, std::size_t entities, std::size_t relations,
                         std::size_t triples) {
    TripleStore s;
    for (std::size_t e = 0; e < entities; ++e) s.entities.add("e" + std::to_string(e));
    for (std::size_t r = 0; r < relations; ++r) s.relations.add("r" + std::to_string(r));
    std::unordered_set<std::uint64_t> seen;
    while (s.triples.size() < triples) {
        Triple x{static_cast<EntityId>(uniform_index(rng, entities)),
                 static_cast<RelationId>(uniform_index(rng, relations)),
                 static_cast<EntityId>(uniform_index(rng, entities))};
        if (x.head == x.tail) continue;
        if (seen.insert(pack_triple(x)).second) s.triples.push_back(x);
    }
    return s;
}

ParameterStore random_params(ModelKind kind, std::size_t dim, std::size_t entities,
                             std::size_t relations, std::uint64_t seed) {
    ModelConfig mc;
    mc.kind = kind;
    mc.dim = dim;
    mc.margin = 2.0;
    mc.seed = seed;
    ParameterStore p = init_parameters(mc, entities, relations, {false, false, 0.2});
    auto rng = make_rng(seed ^ 0xabcdef, RngStream::synth);
    for (double& x : p.entity_re) x = uniform_real(rng, -1.0, 1.0);
    for (double& x : p.entity_im) x = uniform_real(rng, -1.0, 1.0);
    return p;
}

// TransE on a 1-dimensional number line: score(h, r, t) = -|v_h + shift - v_t|.
ParameterStore line_params(const std::vector<double>& values, double shift) {
    ModelConfig mc;
    mc.kind = ModelKind::transe;
    mc.dim = 1;
    mc.margin = 1.0;
    mc.seed = 99;
    ParameterStore p = init_parameters(mc, values.size(), 1);
    for (std::size_t e = 0; e < values.size(); ++e) {
        p.entity_re[e] = values[e];
        p.entity_im[e] = 0.0;
    }
    p.relation_theta[0] = shift;
    return p;
}

void set_weights(ParameterStore& p, RelationId r, const WeightMatrix& w) {
    for (std::size_t i = 0; i < 8; ++i) p.relation_w[p.w_offset(r) + i] = w[i];
}

// Reference ranking: single-triple scoring, explicit filter walk.
double oracle_rank(const ParameterStore& p, const GraphIndex& index, const Triple& x,
                   CorruptSide side) {
    Triple cand = x;
    const EntityId oracle = side == CorruptSide::tail ? x.tail : x.head;
    const double target = score(p, x);
    std::size_t better = 0, tied = 0;
    for (EntityId e = 0; e < index.num_entities(); ++e) {
        if (e == oracle) continue;
        (side == CorruptSide::tail ? cand.tail : cand.head) = e;
        if (index.is_known_triple(cand)) continue;
        const double s = score(p, cand);
        if (s > target) ++better;
        if (s == target) ++tied;
    }
    return 1.0 + static_cast<double>(better) + static_cast<double>(tied) / 2.0;
}

}  // namespace

// --- ranking ------------------------------------------------------------------

TEST_CASE("a strictly best oracle ranks first") {
    const TripleStore s = store_from("A\tr\tB\nC\tr\tD\n");
    const GraphIndex g(s);
    // shift 1: (A, r, ?) targets value 4. B hits it exactly, the rest miss.
    const ParameterStore p = line_params({3.0, 4.0, 5.0, 9.0}, 1.0);
    REQUIRE(filtered_rank(p, g, s.triples[0], CorruptSide::tail) == 1.0);
}

TEST_CASE("known triples from other splits are filtered out of the candidates") {
    // Train knows all four entities; the test split adds two more r-edges
    // from A, one of which is the probe.
    TripleStore train = store_from("A\tr\tB\nD\tr2\tA\nC\tr2\tA\n");
    LoadOptions test_opts;
    test_opts.split = Split::test;
    test_opts.freeze_vocab = true;
    std::istringstream test_in("A\tr\tC\nA\tr\tD\n");
    const TripleStore test = load_triples(test_in, test_opts, &train);

    const EntityId A = train.entities.id_of("A");
    const EntityId D = train.entities.id_of("D");
    const RelationId r = train.relations.id_of("r");
    const Triple probe{A, r, D};

    // Entity ids follow first appearance: A=0, B=1, D=2, C=3.
    // Target value 10; C lands nearest, D second, A far away.
    const ParameterStore p = line_params({0.0, 5.0, 9.8, 9.9}, 10.0);

    // Train-only filtering leaves the sibling test triple (A, r, C) as a
    // competitor: C outranks D.
    const GraphIndex train_only(train);
    REQUIRE(filtered_rank(p, train_only, probe, CorruptSide::tail) == 2.0);

    // With the test split in the filter, B and C both drop out and only the
    // far-away head A remains: D ranks first.
    const GraphIndex full(train, {&test});
    REQUIRE(filtered_rank(p, full, probe, CorruptSide::tail) == 1.0);

    SECTION("the oracle itself is never filtered despite being a known triple") {
        const double rank = filtered_rank(p, full, probe, CorruptSide::tail);
        REQUIRE(rank >= 1.0);
        REQUIRE(rank <= 2.0);  // candidate set is exactly {A, D}
    }
}

TEST_CASE("fully tied candidates share the expected rank") {
    const TripleStore s = store_from("A\tr\tB\nC\tr\tD\nE\tr\tF\n");
    const GraphIndex g(s);
    const ParameterStore p = line_params({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, 0.0);
    // (A, r, ?) filters nothing (B is the oracle), so all six candidates
    // stay and every score ties: expected rank (1 + 6) / 2.
    const double rank = filtered_rank(p, g, s.triples[0], CorruptSide::tail);
    REQUIRE(rank == Approx(3.5).margin(1e-12));
}

TEST_CASE("batched ranking agrees with a single-triple reference walk") {
    auto synth = make_rng(61, RngStream::synth);
    const TripleStore train = random_store(synth, 20, 3, 70);
    const GraphIndex g(train);

    for (ModelKind kind : {ModelKind::transe, ModelKind::rotate, ModelKind::rate}) {
        const ParameterStore p = random_params(kind, 6, 20, 3, 17);
        for (std::size_t i = 0; i < 12; ++i) {
            const Triple& x = train.triples[i];
            for (CorruptSide side : {CorruptSide::head, CorruptSide::tail})
                REQUIRE(filtered_rank(p, g, x, side) == oracle_rank(p, g, x, side));
        }
    }
}

TEST_CASE("ranks stay within the candidate-count bound") {
    auto synth = make_rng(62, RngStream::synth);
    const TripleStore train = random_store(synth, 15, 2, 50);
    const GraphIndex g(train);
    const ParameterStore p = random_params(ModelKind::rate, 4, 15, 2, 23);
    const auto events = rank_events(p, g, train.triples, SideFilter::both);
    REQUIRE(events.size() == 2 * train.triples.size());
    for (const auto& ev : events) {
        REQUIRE(ev.rank >= 1.0);
        REQUIRE(ev.rank <= 15.0);
    }
}

TEST_CASE("ranks are invariant under monotone score transforms") {
    const TripleStore s = store_from("A\tr\tB\nC\tr\tD\n");
    const GraphIndex g(s);
    auto rng = make_rng(63, RngStream::eval);
    std::vector<double> scores(4);
    for (int trial = 0; trial < 50; ++trial) {
        for (double& v : scores) v = uniform_real(rng, -5.0, 5.0);
        if (trial % 5 == 0) scores[1] = scores[3];  // inject ties
        const double base = detail::rank_with_scores(g, s.triples[0], CorruptSide::tail, scores);
        std::vector<double> mapped(scores);
        for (double& v : mapped) v = 0.5 * v - 7.0;  // affine keeps ties exact
        REQUIRE(detail::rank_with_scores(g, s.triples[0], CorruptSide::tail, mapped) == base);
    }
}

TEST_CASE("multithreaded ranking matches the serial order and values") {
    auto synth = make_rng(64, RngStream::synth);
    const TripleStore train = random_store(synth, 25, 3, 90);
    const GraphIndex g(train);
    const ParameterStore p = random_params(ModelKind::rate, 5, 25, 3, 31);
    const auto serial = rank_events(p, g, train.triples, SideFilter::both, 1);
    const auto parallel = rank_events(p, g, train.triples, SideFilter::both, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].rank == parallel[i].rank);
        REQUIRE(serial[i].side == parallel[i].side);
        REQUIRE(pack_triple(serial[i].triple) == pack_triple(parallel[i].triple));
    }
}

// --- metrics -----------------------------------------------------------------

TEST_CASE("metric aggregation matches hand-computed values") {
    std::vector<RankedEvent> events(3);
    events[0].rank = 1.0;
    events[1].rank = 2.0;
    events[2].rank = 4.0;
    const Metrics m = aggregate_metrics(events);
    REQUIRE(m.count == 3);
    REQUIRE(m.mr == Approx(7.0 / 3.0).margin(1e-12));
    REQUIRE(m.mrr == Approx((1.0 + 0.5 + 0.25) / 3.0).margin(1e-12));
    REQUIRE(m.hits1 == Approx(1.0 / 3.0).margin(1e-12));
    REQUIRE(m.hits3 == Approx(2.0 / 3.0).margin(1e-12));
    REQUIRE(m.hits10 == 1.0);
}

TEST_CASE("empty event sets aggregate to zeroed metrics") {
    const Metrics m = aggregate_metrics({});
    REQUIRE(m.count == 0);
    REQUIRE(m.mr == 0.0);
    REQUIRE(m.mrr == 0.0);
}

TEST_CASE("a perfect geometric fit scores perfect metrics") {
    const TripleStore s = store_from("e0\tnext\te1\ne1\tnext\te2\ne2\tnext\te3\n");
    const GraphIndex g(s);
    const ParameterStore p = line_params({0.0, 1.0, 2.0, 3.0}, 1.0);
    const Metrics m = evaluate(p, g, s.triples);
    REQUIRE(m.count == 6);
    REQUIRE(m.mr == 1.0);
    REQUIRE(m.mrr == 1.0);
    REQUIRE(m.hits1 == 1.0);
    REQUIRE(m.hits10 == 1.0);
}

TEST_CASE("metric sanity bounds hold for random parameters") {
    auto synth = make_rng(65, RngStream::synth);
    const TripleStore train = random_store(synth, 18, 2, 60);
    const GraphIndex g(train);
    const ParameterStore p = random_params(ModelKind::rotate, 4, 18, 2, 41);
    const Metrics m = evaluate(p, g, train.triples);
    REQUIRE(m.mr >= 1.0);
    REQUIRE(m.mrr > 0.0);
    REQUIRE(m.mrr <= 1.0);
    REQUIRE(m.hits1 <= m.hits3);
    REQUIRE(m.hits3 <= m.hits10);
    REQUIRE(m.hits10 <= 1.0);
}

TEST_CASE("metrics do not depend on the order of the evaluation set") {
    auto synth = make_rng(66, RngStream::synth);
    const TripleStore train = random_store(synth, 16, 2, 50);
    const GraphIndex g(train);
    const ParameterStore p = random_params(ModelKind::rate, 4, 16, 2, 43);

    std::vector<Triple> shuffled = train.triples;
    std::reverse(shuffled.begin(), shuffled.end());
    const Metrics a = evaluate(p, g, train.triples);
    const Metrics b = evaluate(p, g, shuffled);
    REQUIRE(a.count == b.count);
    REQUIRE(a.mr == Approx(b.mr).margin(1e-12));
    REQUIRE(a.mrr == Approx(b.mrr).margin(1e-12));
    REQUIRE(a.hits10 == Approx(b.hits10).margin(1e-12));
}

// --- relation profiles --------------------------------------------------------

TEST_CASE("relation typing follows the average-degree thresholds") {
    SECTION("one pair is 1-to-1") {
        const TripleStore s = store_from("A\tr\tB\n");
        const auto profiles = classify_relation_types(s);
        REQUIRE(profiles.size() == 1);
        REQUIRE(profiles[0].type == RelationType::one_to_one);
        REQUIRE(profiles[0].tails_per_head == 1.0);
        REQUIRE(profiles[0].heads_per_tail == 1.0);
    }
    SECTION("fan-out is 1-to-M") {
        const TripleStore s = store_from("A\tr\tB\nA\tr\tC\n");
        const auto profiles = classify_relation_types(s);
        REQUIRE(profiles[0].type == RelationType::one_to_many);
        REQUIRE(profiles[0].tails_per_head == 2.0);
        REQUIRE(profiles[0].heads_per_tail == 1.0);
    }
    SECTION("fan-in is M-to-1") {
        const TripleStore s = store_from("A\tr\tB\nC\tr\tB\n");
        const auto profiles = classify_relation_types(s);
        REQUIRE(profiles[0].type == RelationType::many_to_one);
    }
    SECTION("a bipartite block is M-to-M") {
        const TripleStore s = store_from("A\tr\tB\nA\tr\tC\nD\tr\tB\nD\tr\tC\n");
        const auto profiles = classify_relation_types(s);
        REQUIRE(profiles[0].type == RelationType::many_to_many);
        REQUIRE(profiles[0].tails_per_head == 2.0);
        REQUIRE(profiles[0].heads_per_tail == 2.0);
        REQUIRE(profiles[0].triple_count == 4);
    }
}

TEST_CASE("relation profiles cover every relation and count every triple") {
    auto synth = make_rng(67, RngStream::synth);
    const TripleStore s = random_store(synth, 20, 5, 80);
    const auto profiles = classify_relation_types(s);
    REQUIRE(profiles.size() == 5);
    std::size_t total = 0;
    for (const auto& pr : profiles) {
        total += pr.triple_count;
        if (pr.triple_count > 0) {
            REQUIRE(pr.tails_per_head >= 1.0);
            REQUIRE(pr.heads_per_tail >= 1.0);
        }
    }
    REQUIRE(total == 80);
}

TEST_CASE("relation type names are the four canonical labels") {
    REQUIRE(std::string(relation_type_name(RelationType::one_to_one)) == "1-to-1");
    REQUIRE(std::string(relation_type_name(RelationType::one_to_many)) == "1-to-M");
    REQUIRE(std::string(relation_type_name(RelationType::many_to_one)) == "M-to-1");
    REQUIRE(std::string(relation_type_name(RelationType::many_to_many)) == "M-to-M");
}

// --- grouped metrics -----------------------------------------------------------

TEST_CASE("single-relation grouping reproduces the headline metrics") {
    auto synth = make_rng(68, RngStream::synth);
    const TripleStore s = random_store(synth, 14, 1, 40);
    const GraphIndex g(s);
    const ParameterStore p = random_params(ModelKind::rate, 4, 14, 1, 53);
    const auto profiles = classify_relation_types(s);

    const auto rows =
        metrics_by_group(p, g, s.triples, Grouping::relation, SideFilter::both, profiles);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].group == "r0");

    const Metrics overall = evaluate(p, g, s.triples);
    REQUIRE(rows[0].metrics.count == overall.count);
    REQUIRE(rows[0].metrics.mrr == Approx(overall.mrr).margin(1e-12));
}

TEST_CASE("per-relation rows micro-average back to the overall metrics") {
    auto synth = make_rng(69, RngStream::synth);
    const TripleStore s = random_store(synth, 18, 4, 70);
    const GraphIndex g(s);
    const ParameterStore p = random_params(ModelKind::rotate, 4, 18, 4, 59);
    const auto profiles = classify_relation_types(s);

    const auto rows = metrics_by_group(p, g, s.triples, Grouping::relation, SideFilter::both,
                                       profiles, &s.relations);
    const Metrics overall = evaluate(p, g, s.triples);

    double weighted_mrr = 0.0, weighted_mr = 0.0;
    std::size_t total = 0;
    for (const auto& row : rows) {
        weighted_mrr += row.metrics.mrr * static_cast<double>(row.metrics.count);
        weighted_mr += row.metrics.mr * static_cast<double>(row.metrics.count);
        total += row.metrics.count;
        REQUIRE(s.relations.contains(row.group));
    }
    REQUIRE(total == overall.count);
    REQUIRE(weighted_mrr / static_cast<double>(total) == Approx(overall.mrr).margin(1e-9));
    REQUIRE(weighted_mr / static_cast<double>(total) == Approx(overall.mr).margin(1e-9));
}

TEST_CASE("type grouping always emits the four fixed rows") {
    const TripleStore s = store_from("A\tr\tB\nA\tr\tC\n");  // single 1-to-M relation
    const GraphIndex g(s);
    const ParameterStore p = random_params(ModelKind::transe, 3, 3, 1, 61);
    const auto profiles = classify_relation_types(s);

    const auto rows = metrics_by_group(p, g, s.triples, Grouping::relation_type, SideFilter::tail,
                                       profiles);
    REQUIRE(rows.size() == 4);
    REQUIRE(rows[0].group == "1-to-1");
    REQUIRE(rows[1].group == "1-to-M");
    REQUIRE(rows[2].group == "M-to-1");
    REQUIRE(rows[3].group == "M-to-M");
    REQUIRE(rows[0].metrics.count == 0);
    REQUIRE(rows[1].metrics.count == 2);  // tail side only
    REQUIRE(rows[2].metrics.count == 0);
    REQUIRE(rows[3].metrics.count == 0);
    for (const auto& row : rows) REQUIRE(row.side == "tail");
}

// --- weight norms ---------------------------------------------------------------

TEST_CASE("weight norm report returns each relation's matrix L1 norm") {
    ModelConfig mc;
    mc.kind = ModelKind::rate;
    mc.dim = 2;
    mc.margin = 1.0;
    mc.seed = 5;
    ParameterStore p = init_parameters(mc, 4, 3);

    set_weights(p, 0, WeightMatrix::standard());
    WeightMatrix grouping_like;  // near-symmetric profile, small norm
    grouping_like.w = {1.0, 0.1, 0.0, 0.1, 0.0, 0.1, 1.0, 0.0};
    set_weights(p, 1, grouping_like);
    WeightMatrix hierarchy_like;  // heavier mixing, large norm
    hierarchy_like.w = {0.9, 1.2, 0.0, -1.7, 0.0, 1.2, 0.9, -1.2};
    set_weights(p, 2, hierarchy_like);

    const auto report = weight_norm_report(p);
    REQUIRE(report.size() == 3);
    REQUIRE(report[0].first == 0);
    REQUIRE(report[0].second == Approx(4.0).margin(1e-12));
    REQUIRE(report[1].second == Approx(2.3).margin(1e-12));
    REQUIRE(report[2].second == Approx(7.1).margin(1e-12));
}

TEST_CASE("weight norms are only defined for the weighted-product model") {
    ModelConfig mc;
    mc.kind = ModelKind::rotate;
    mc.dim = 2;
    mc.margin = 1.0;
    mc.seed = 5;
    const ParameterStore p = init_parameters(mc, 3, 2);
    REQUIRE_THROWS_AS(weight_norm_report(p), ContractError);
}
