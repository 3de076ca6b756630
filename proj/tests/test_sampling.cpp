#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "rate/graph_index.hpp"
#include "rate/rng.hpp"
#include "rate/sampling.hpp"
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
        if (seen.insert(pack_triple(x)).second) s.triples.push_back(x);
    }
    return s;
}

}  // namespace

TEST_CASE("gamma 0.5 with 128 negatives splits the pools 64/64") {
    auto synth = make_rng(1, RngStream::synth);
    const TripleStore s = random_store(synth, 200, 1, 100);
    const GraphIndex g(s);

    SamplerConfig cfg;
    cfg.head_corruption_prob = 0.0;  // pin the tail side for a deterministic check
    SamplerState state;
    state.gamma = 0.5;
    auto rng = make_rng(2, RngStream::sampler);

    const NegativeBatch b = sample_negatives(g, s.triples[0], 128, state, rng, cfg);
    REQUIRE(b.side == CorruptSide::tail);
    REQUIRE(b.pool_n.size() == 64);
    REQUIRE(b.pool_nbar.size() == 64);
    REQUIRE(b.size() == 128);
}

TEST_CASE("rounding of the pool split follows round(gamma*n)") {
    auto synth = make_rng(3, RngStream::synth);
    const TripleStore s = random_store(synth, 100, 1, 60);
    const GraphIndex g(s);
    SamplerConfig cfg;
    cfg.head_corruption_prob = 0.0;
    auto rng = make_rng(4, RngStream::sampler);

    SamplerState state;
    state.gamma = 0.33;
    const NegativeBatch b = sample_negatives(g, s.triples[0], 10, state, rng, cfg);
    REQUIRE(b.pool_n.size() == 3);  // round(3.3)

    state.gamma = 0.35;
    const NegativeBatch b2 = sample_negatives(g, s.triples[0], 10, state, rng, cfg);
    REQUIRE(b2.pool_n.size() == 4);  // round(3.5) away from zero
}

TEST_CASE("empty type-constrained pool falls back to the complement") {
    const TripleStore s = store_from("A\tr\tB\n");
    const GraphIndex g(s);
    SamplerConfig cfg;
    cfg.head_corruption_prob = 0.0;
    SamplerState state;
    state.gamma = 1.0;  // would want all 10 from the constrained pool
    auto rng = make_rng(5, RngStream::sampler);

    const NegativeBatch b = sample_negatives(g, s.triples[0], 10, state, rng, cfg);
    REQUIRE(b.pool_n.empty());
    REQUIRE(b.pool_nbar.size() == 10);
    for (std::size_t i = 0; i < b.size(); ++i)
        REQUIRE_FALSE(g.in_relation_range(0, b.entity(i)));
}

TEST_CASE("empty complement falls back to the type-constrained pool") {
    // Every entity is an observed tail of r, so the complement is empty.
    const TripleStore s = store_from("A\tr\tB\nB\tr\tC\nC\tr\tA\n");
    const GraphIndex g(s);
    SamplerConfig cfg;
    cfg.head_corruption_prob = 0.0;
    SamplerState state;
    state.gamma = 0.2;
    auto rng = make_rng(6, RngStream::sampler);

    const NegativeBatch b = sample_negatives(g, s.triples[0], 10, state, rng, cfg);
    REQUIRE(b.pool_nbar.empty());
    REQUIRE(b.pool_n.size() == 10);
}

TEST_CASE("a graph with no admissible corruption raises a sampling error") {
    const TripleStore s = store_from("A\tr\tA\n");
    const GraphIndex g(s);
    SamplerState state;
    auto rng = make_rng(7, RngStream::sampler);
    REQUIRE_THROWS_AS(sample_negatives(g, s.triples[0], 4, state, rng, {}), SamplingError);
}

TEST_CASE("negatives on the two-triple example graph") {
    const TripleStore s = store_from("A\tr\tB\nC\tr\tD\n");
    const GraphIndex g(s);
    const EntityId D = s.entities.id_of("D");

    SamplerConfig cfg;
    cfg.head_corruption_prob = 0.0;
    SamplerState state;
    state.gamma = 0.5;
    auto rng = make_rng(8, RngStream::sampler);

    const NegativeBatch b = sample_negatives(g, s.triples[0], 8, state, rng, cfg);
    REQUIRE(b.pool_n.size() == 4);
    for (EntityId e : b.pool_n) REQUIRE(e == D);  // the only admissible in-range tail
    for (EntityId e : b.pool_nbar) REQUIRE_FALSE(g.in_relation_range(0, e));
}

TEST_CASE("every sampled negative is absent from the training split") {
    auto synth = make_rng(9, RngStream::synth);
    const TripleStore s = random_store(synth, 50, 4, 300);
    const GraphIndex g(s);
    SamplerState state;
    state.gamma = 0.5;
    auto rng = make_rng(10, RngStream::sampler);

    for (int i = 0; i < 200; ++i) {
        const Triple& x = s.triples[uniform_index(rng, s.triples.size())];
        const NegativeBatch b = sample_negatives(g, x, 16, state, rng, {});
        for (std::size_t k = 0; k < b.size(); ++k)
            REQUIRE_FALSE(g.in_train(b.corrupted(x, k)));
        for (EntityId e : b.pool_n)
            REQUIRE((b.side == CorruptSide::tail ? g.in_relation_range(x.relation, e)
                                                 : g.in_relation_domain(x.relation, e)));
        for (EntityId e : b.pool_nbar)
            REQUIRE_FALSE((b.side == CorruptSide::tail ? g.in_relation_range(x.relation, e)
                                                       : g.in_relation_domain(x.relation, e)));
    }
}

TEST_CASE("local-cognitive off draws everything from the complement") {
    auto synth = make_rng(11, RngStream::synth);
    const TripleStore s = random_store(synth, 80, 1, 40);
    const GraphIndex g(s);
    SamplerConfig cfg;
    cfg.local_cognitive = false;
    cfg.head_corruption_prob = 0.0;
    SamplerState state;
    state.gamma = 0.9;  // must be ignored
    auto rng = make_rng(12, RngStream::sampler);

    const NegativeBatch b = sample_negatives(g, s.triples[0], 12, state, rng, cfg);
    REQUIRE(b.pool_n.empty());
    REQUIRE(b.pool_nbar.size() == 12);
}

TEST_CASE("sampling is deterministic under a fixed stream") {
    auto synth = make_rng(13, RngStream::synth);
    const TripleStore s = random_store(synth, 60, 2, 150);
    const GraphIndex g(s);
    SamplerState state;
    auto rng1 = make_rng(14, RngStream::sampler);
    auto rng2 = make_rng(14, RngStream::sampler);
    for (int i = 0; i < 20; ++i) {
        const Triple& x = s.triples[i];
        const NegativeBatch a = sample_negatives(g, x, 8, state, rng1, {});
        const NegativeBatch b = sample_negatives(g, x, 8, state, rng2, {});
        REQUIRE(a.side == b.side);
        REQUIRE(a.pool_n == b.pool_n);
        REQUIRE(a.pool_nbar == b.pool_nbar);
    }
}

// --- self-adversarial weights ---------------------------------------------

TEST_CASE("adversarial weight worked examples") {
    const double scores1[] = {-1.0, -1.0};
    const auto beta1 = adversarial_weights(scores1);
    REQUIRE(beta1[0] == Approx(0.5).margin(1e-12));
    REQUIRE(beta1[1] == Approx(0.5).margin(1e-12));

    const double scores2[] = {-3.7};
    REQUIRE(adversarial_weights(scores2)[0] == Approx(1.0).margin(1e-12));

    const double scores3[] = {0.0, std::log(1.0 / 3.0)};
    const auto beta3 = adversarial_weights(scores3);
    REQUIRE(beta3[0] == Approx(0.75).margin(1e-12));
    REQUIRE(beta3[1] == Approx(0.25).margin(1e-12));
}

TEST_CASE("adversarial weights sum to one and ignore score shifts") {
    auto rng = make_rng(15, RngStream::synth);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> scores(1 + uniform_index(rng, 12));
        for (double& s : scores) s = uniform_real(rng, -50.0, 0.0);
        const auto beta = adversarial_weights(scores);
        double sum = 0.0;
        for (double b : beta) sum += b;
        REQUIRE(sum == Approx(1.0).margin(1e-6));

        const double shift = uniform_real(rng, -100.0, 100.0);
        std::vector<double> shifted = scores;
        for (double& s : shifted) s += shift;
        const auto beta2 = adversarial_weights(shifted);
        for (std::size_t k = 0; k < beta.size(); ++k)
            REQUIRE(beta2[k] == Approx(beta[k]).margin(1e-12));
    }
}

TEST_CASE("extremely negative scores do not produce NaN weights") {
    const double scores[] = {-1000.0, -2000.0, -1.0};
    const auto beta = adversarial_weights(scores);
    for (double b : beta) REQUIRE(std::isfinite(b));
    REQUIRE(beta[2] == Approx(1.0).margin(1e-12));
}

TEST_CASE("uniform weights are the flat distribution") {
    const auto w = uniform_weights(4);
    for (double x : w) REQUIRE(x == 0.25);
    REQUIRE_THROWS_AS(uniform_weights(0), ContractError);
}

// --- gamma updates ----------------------------------------------------------

namespace {

NegativeBatch scored_batch(std::size_t n_count, std::size_t nbar_count,
                           std::vector<double> scores) {
    NegativeBatch b;
    b.pool_n.assign(n_count, 0);
    b.pool_nbar.assign(nbar_count, 1);
    b.scores = std::move(scores);
    return b;
}

}  // namespace

TEST_CASE("gamma term worked examples") {
    SamplerState state;

    SECTION("identical pool means give 0.5") {
        auto b = scored_batch(2, 2, {-1.0, -1.0, -1.0, -1.0});
        accumulate_gamma_term(state, b);
        REQUIRE(state.epoch_accumulator == Approx(0.5).margin(1e-12));
    }
    SECTION("complement mean three times larger gives 0.25") {
        const double s3 = std::log(3.0);
        auto b = scored_batch(2, 2, {0.0, 0.0, s3, s3});
        accumulate_gamma_term(state, b);
        REQUIRE(state.epoch_accumulator == Approx(0.25).margin(1e-12));
    }
    SECTION("two triples with terms 0.5 and 0.25 average to 0.375") {
        auto b1 = scored_batch(2, 2, {-1.0, -1.0, -1.0, -1.0});
        auto b2 = scored_batch(2, 2, {0.0, 0.0, std::log(3.0), std::log(3.0)});
        accumulate_gamma_term(state, b1);
        accumulate_gamma_term(state, b2);
        REQUIRE(finalize_gamma(state) == Approx(0.375).margin(1e-12));
    }
}

TEST_CASE("finalize leaves gamma unchanged on an empty epoch") {
    SamplerState state;
    state.gamma = 0.5;
    REQUIRE(finalize_gamma(state) == 0.5);
}

TEST_CASE("empty-pool batches are skipped in the gamma average") {
    SamplerState state;
    auto b = scored_batch(0, 4, {-1.0, -2.0, -3.0, -4.0});
    accumulate_gamma_term(state, b);
    REQUIRE(state.triples_seen == 0);
    REQUIRE(state.triples_skipped == 1);
    REQUIRE(finalize_gamma(state) == 0.5);
}

TEST_CASE("gamma saturates toward the harder pool") {
    SamplerState state;
    // Constrained negatives vastly harder (higher scores) than complement ones.
    auto hard_n = scored_batch(2, 2, {100.0, 100.0, -100.0, -100.0});
    accumulate_gamma_term(state, hard_n);
    REQUIRE(finalize_gamma(state) == Approx(1.0).margin(1e-12));

    auto hard_nbar = scored_batch(2, 2, {-100.0, -100.0, 100.0, 100.0});
    accumulate_gamma_term(state, hard_nbar);
    REQUIRE(finalize_gamma(state) == Approx(0.0).margin(1e-12));
}

TEST_CASE("gamma stays in the unit interval over random epochs") {
    auto rng = make_rng(16, RngStream::synth);
    SamplerState state;
    for (int epoch = 0; epoch < 50; ++epoch) {
        const std::size_t triples = 1 + uniform_index(rng, 8);
        for (std::size_t i = 0; i < triples; ++i) {
            std::vector<double> scores(6);
            for (double& s : scores) s = uniform_real(rng, -80.0, 0.0);
            auto b = scored_batch(3, 3, std::move(scores));
            accumulate_gamma_term(state, b);
        }
        const double gamma = finalize_gamma(state);
        REQUIRE(gamma >= 0.0);
        REQUIRE(gamma <= 1.0);
    }
}

TEST_CASE("unfilled scores are rejected by the gamma update") {
    SamplerState state;
    auto b = scored_batch(2, 2, {1.0});
    REQUIRE_THROWS_AS(accumulate_gamma_term(state, b), ContractError);
}
