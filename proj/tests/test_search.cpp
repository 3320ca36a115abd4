#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include <map>
#include <random>
#include <set>

using namespace rtba;

namespace {

// Independent recursive count of every sequence with up to n flybys.
std::uint64_t brute_count(std::uint64_t m, std::uint64_t n) {
    if (n == 0) return 1;
    return 1 + m * brute_count(m, n - 1);
}

void enumerate(std::size_t m, std::size_t depth, std::vector<std::size_t>& prefix,
               std::set<std::vector<std::size_t>>& out) {
    out.insert(prefix);
    if (depth == 0) return;
    for (std::size_t k = 0; k < m; ++k) {
        prefix.push_back(k);
        enumerate(m, depth - 1, prefix, out);
        prefix.pop_back();
    }
}

SequenceRecord make_record(const std::string& seq, std::vector<double> dvs, double chi = 0.7) {
    SequenceRecord r;
    r.sequence = Sequence::parse(seq);
    r.island_dvs = std::move(dvs);
    score_record(r, chi);
    return r;
}

// Deterministic pseudo-cost from the sequence string; scale multiplies it.
BatchEvaluator stub(double scale = 1.0, double chi = 0.7, std::vector<std::string>* log = nullptr) {
    return [=](std::span<const Sequence> batch) {
        std::vector<SequenceRecord> out;
        for (const auto& s : batch) {
            if (log) log->push_back(s.str());
            std::vector<double> dvs;
            for (int i = 0; i < 3; ++i)
                dvs.push_back(scale * (5000.0 + static_cast<double>(derive_seed(0, s.str(), i) % 20000)));
            out.push_back(make_record(s.str(), dvs, chi));
        }
        return out;
    };
}

BatchEvaluator constant_stub() {
    return [](std::span<const Sequence> batch) {
        std::vector<SequenceRecord> out;
        for (const auto& s : batch) out.push_back(make_record(s.str(), {10000.0}));
        return out;
    };
}

RtbaConfig counting_config() {
    RtbaConfig c;
    c.sga.population_size = 4;
    c.sga.generations = 1;
    return c;
}

}  // namespace

TEST_CASE("tree complexity") {
    CHECK(complexity(8, 3) == 585);
    for (std::uint64_t m = 1; m <= 8; ++m) {
        CHECK(complexity(m, 0) == 1);
        for (std::uint64_t n = 0; n <= 4; ++n) {
            std::set<std::vector<std::size_t>> all;
            std::vector<std::size_t> prefix;
            enumerate(m, n, prefix, all);
            CHECK(complexity(m, n) == all.size());
            CHECK(complexity(m, n) == brute_count(m, n));
        }
    }
    CHECK(complexity(3, 2) == 13);
    CHECK_THROWS_AS(complexity(1u << 20, 4), DomainError);
    CHECK_THROWS_AS(complexity(0, 2), DomainError);
}

TEST_CASE("flyby candidates") {
    const PlanetSystem sys;
    RtbaConfig c;
    auto codes = [&] {
        std::string s;
        for (Planet p : candidate_bodies(sys, c)) s.push_back(planet_code(p));
        return s;
    };
    CHECK(codes() == "YVEMJ");
    c.arrival_body = Planet::Mercury;
    CHECK(codes() == "Y");
    c.arrival_body = Planet::Venus;
    CHECK(codes() == "YV");
    c.arrival_body = Planet::Neptune;
    CHECK(codes() == "YVEMJSUN");
}

TEST_CASE("round-robin allocation") {
    CHECK(round_robin_allocation(5, 7) == std::vector<std::size_t>{2, 2, 1, 1, 1});
    CHECK(round_robin_allocation(3, 3) == std::vector<std::size_t>{1, 1, 1});
    CHECK(round_robin_allocation(4, 0) == std::vector<std::size_t>{0, 0, 0, 0});
}

TEST_CASE("sampling") {
    const PlanetSystem sys;
    RtbaConfig c;
    const auto cand = candidate_bodies(sys, c);
    SearchState st;
    const auto tree = subtree(st, c, cand);
    REQUIRE(tree.size() == 156);

    SUBCASE("full count returns the whole tree once") {
        Rng rng(1);
        const auto s = sample_sequences(st, c, cand, tree.size(), rng);
        CHECK_FALSE(s.exhausted);
        std::set<std::string> seen;
        for (const auto& q : s.sequences) seen.insert(q.str());
        CHECK(seen.size() == tree.size());
        CHECK(s.sequences.front().str() == "EJ");
    }
    SUBCASE("spread over target bodies") {
        Rng rng(2);
        const auto s = sample_sequences(st, c, cand, 8, rng);
        std::map<char, int> per_tb;
        for (const auto& q : s.sequences)
            if (q.bodies.size() > 2) ++per_tb[planet_code(q.bodies[1])];
        CHECK(per_tb['Y'] == 2);
        CHECK(per_tb['V'] == 2);
        CHECK(per_tb['E'] == 1);
        CHECK(per_tb['M'] == 1);
        CHECK(per_tb['J'] == 1);
    }
    SUBCASE("repeated draws never repeat a sequence") {
        Rng rng(3);
        std::size_t draws = 0;
        for (int trial = 0; trial < 10000 && !st.exhausted; ++trial) {
            const auto s = sample_sequences(st, c, cand, 1 + static_cast<std::size_t>(trial % 3), rng);
            for (const auto& q : s.sequences) {
                REQUIRE(st.evaluated_set.insert(q.str()).second);
                ++draws;
            }
            if (s.exhausted) st.exhausted = true;
            if (st.evaluated_set.size() == tree.size()) {
                st.evaluated_set.clear();
            }
        }
        CHECK(draws > 1000);
    }
    SUBCASE("exhaustion is flagged") {
        for (const auto& q : tree) st.evaluated_set.insert(q.str());
        st.evaluated_set.erase("EMJ");
        Rng rng(4);
        const auto s = sample_sequences(st, c, cand, 5, rng);
        CHECK(s.exhausted);
        REQUIRE(s.sequences.size() == 1);
        CHECK(s.sequences[0].str() == "EMJ");
    }
}

TEST_CASE("sequence fitness blend") {
    auto r = make_record("EMJ", {10000.0, 20000.0, 30000.0}, 0.7);
    CHECK(r.f_s == doctest::Approx(13000.0));
    CHECK(make_record("EMJ", {12345.0}, 1.0).f_s == 12345.0);
    for (double chi : {0.0, 0.3, 1.0}) CHECK(make_record("EJ", {7000.0, 7000.0, 7000.0}, chi).f_s == 7000.0);
    CHECK(make_record("EJ", {10000.0, 30000.0}, 1.0).f_s == 10000.0);
    auto bad = make_record("EJ", {kInfeasibleDeltaV, kInfeasibleDeltaV});
    CHECK_FALSE(bad.feasible);
    CHECK(bad.f_s == kInfeasibleDeltaV);
}

TEST_CASE("target body fitness") {
    TbCandidate c;
    c.body = Planet::Mars;
    c.member_records = {make_record("EMJ", {12000.0}), make_record("EMMJ", {18000.0})};
    auto scored = tb_fitness({c}, 0.5);
    REQUIRE(scored.size() == 1);
    CHECK(scored[0].f_tb == doctest::Approx(13500.0));
    CHECK(tb_fitness({c}, 1.0)[0].f_tb == 12000.0);
    TbCandidate single = c;
    single.member_records.resize(1);
    for (double xi : {0.0, 0.4, 1.0}) CHECK(tb_fitness({single}, xi)[0].f_tb == 12000.0);
    TbCandidate empty;
    CHECK(tb_fitness({empty, c}, 0.5).size() == 1);
}

TEST_CASE("blend stays between min and mean") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dv(1000.0, 60000.0);
    std::uniform_int_distribution<int> size(1, 20);
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (auto& x : v) x = dv(rng);
        const double mn = *std::min_element(v.begin(), v.end());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        for (int k = 0; k <= 10; ++k) {
            const double f = blend_min_mean(v, k / 10.0);
            CHECK(f >= mn);
            CHECK(f <= mean);
        }
    }
}

TEST_CASE("optimal group") {
    std::vector<SequenceRecord> ranking = {make_record("EMJ", {15400.0}, 1.0), make_record("EJ", {18000.0}, 1.0),
                                           make_record("EVJ", {30000.0}, 1.0)};
    auto g = extract_optimal_group(ranking);
    REQUIRE(g.size() == 2);
    CHECK(g[1].f_s == 18000.0);
    CHECK(extract_optimal_group(std::vector<SequenceRecord>(ranking.begin(), ranking.begin() + 1)).size() == 1);
    std::vector<SequenceRecord> close = {make_record("EJ", {40000.0}, 1.0), make_record("EMJ", {40900.0}, 1.0),
                                         make_record("EVJ", {40500.0}, 1.0)};
    CHECK(extract_optimal_group(close).size() == 3);
    CHECK(in_optimal_group(make_record("EJ", {5000.0 + 4999.0}, 1.0), 5000.0));
}

TEST_CASE("ranking order") {
    const PlanetSystem sys;
    std::vector<SequenceRecord> recs = {make_record("EMJ", {20000.0}, 1.0), make_record("EVJ", {20000.0}, 1.0),
                                        make_record("EJ", {10000.0}, 1.0), make_record("EYJ", {20000.0}, 1.0)};
    const auto ranked = rank_records(recs, sys);
    CHECK(ranked[0].sequence.str() == "EJ");
    CHECK(ranked[1].sequence.str() == "EYJ");
    CHECK(ranked[2].sequence.str() == "EVJ");
    CHECK(ranked[3].sequence.str() == "EMJ");
}

TEST_CASE("recursion sample size rounds up") {
    const PlanetSystem sys;
    auto c = counting_config();
    c.arrival_body = Planet::Neptune;
    c.q = 0.3;
    c.max_recursions = 1;
    REQUIRE(candidate_bodies(sys, c).size() == 8);
    const auto st = run_recursion(SearchState{}, c, sys, constant_stub());
    CHECK(st.evaluated_set.size() == 176);
    CHECK(st.records.size() == 176);
    CHECK(st.recursion_index == 1);
    REQUIRE(st.pseudo_sequence.size() == 1);
    CHECK(st.pseudo_sequence[0] == Planet::Mercury);
}

TEST_CASE("exhaustive recursion on a two-candidate tree") {
    const PlanetSystem sys;
    auto c = counting_config();
    c.arrival_body = Planet::Venus;
    c.max_gas = 1;
    c.q = 1.0;
    c.max_recursions = 1;
    BatchEvaluator eval = [](std::span<const Sequence> batch) {
        std::vector<SequenceRecord> out;
        for (const auto& s : batch)
            out.push_back(make_record(s.str(), {s.str() == "EVV" ? 8000.0 : 12000.0}));
        return out;
    };
    const auto st = run_recursion(SearchState{}, c, sys, eval);
    CHECK(st.evaluated_set == std::set<std::string>{"EV", "EYV", "EVV"});
    REQUIRE(st.pseudo_sequence.size() == 1);
    CHECK(st.pseudo_sequence[0] == Planet::Venus);
}

TEST_CASE("evaluated fraction") {
    const PlanetSystem sys;
    auto c = counting_config();
    SUBCASE("full single recursion") {
        c.arrival_body = Planet::Venus;
        c.max_gas = 2;
        c.q = 1.0;
        c.max_recursions = 1;
        const auto r = run_rtba(c, sys, constant_stub());
        CHECK(r.evaluated_fraction == 1.0);
    }
    SUBCASE("hand-counted toy tree") {
        // Tree over {Y, V} with up to two flybys holds 7 sequences. The first
        // pass takes 4: EV, then two under Y and one under V. Y wins the tie
        // and only EYV, EYYV, EYVV remain below it, one of them unevaluated.
        c.arrival_body = Planet::Venus;
        c.max_gas = 2;
        c.q = 0.5;
        const auto r = run_rtba(c, sys, constant_stub());
        CHECK(r.state.evaluated_set.size() == 5);
        CHECK(r.evaluated_fraction == doctest::Approx(5.0 / 7.0));
    }
    SUBCASE("reference configuration") {
        const auto r = run_rtba(c, sys, constant_stub());
        CHECK(r.state.evaluated_set.size() == 93);
        CHECK(r.evaluated_fraction == doctest::Approx(93.0 / 156.0));
    }
}

TEST_CASE("search invariants") {
    const PlanetSystem sys;
    auto c = counting_config();
    c.q = 0.3;
    c.max_recursions = 3;
    std::vector<std::string> log;
    const auto a = run_rtba(c, sys, stub(1.0, 0.7, &log));
    CHECK(std::set<std::string>(log.begin(), log.end()).size() == log.size());
    CHECK(a.state.evaluated_set.size() == a.state.records.size());
    for (std::size_t i = 1; i < a.ranking.size(); ++i) CHECK(a.ranking[i - 1].f_s <= a.ranking[i].f_s);

    const auto b = run_rtba(c, sys, stub());
    REQUIRE(a.ranking.size() == b.ranking.size());
    for (std::size_t i = 0; i < a.ranking.size(); ++i) CHECK(a.ranking[i].sequence == b.ranking[i].sequence);
    CHECK(a.state.pseudo_sequence == b.state.pseudo_sequence);

    const auto scaled = run_rtba(c, sys, stub(3.7));
    REQUIRE(scaled.ranking.size() == a.ranking.size());
    for (std::size_t i = 0; i < a.ranking.size(); ++i)
        CHECK(scaled.ranking[i].sequence == a.ranking[i].sequence);
    CHECK(scaled.state.pseudo_sequence == a.state.pseudo_sequence);

    c.seed = 99;
    const auto other = run_rtba(c, sys, stub());
    CHECK(other.state.evaluated_set != a.state.evaluated_set);
}

TEST_CASE("direct transfer only") {
    const PlanetSystem sys;
    auto c = counting_config();
    c.max_gas = 0;
    const auto r = run_rtba(c, sys, constant_stub());
    REQUIRE(r.ranking.size() == 1);
    CHECK(r.ranking[0].sequence.str() == "EJ");
    CHECK(r.state.exhausted);
}

TEST_CASE("island windows tile the departure window") {
    RtbaConfig c;
    c.window_start = 61400.0;
    c.window_end = 61640.0;
    c.p = 4;
    for (int i = 0; i < 4; ++i) CHECK(island_window_start(c, i) == 61400.0 + 60.0 * i);
    c.p = 6;
    CHECK(island_window_start(c, 4) == 61400.0);
    CHECK(island_window_start(c, 5) == 61460.0);
    c.p = 2;
    CHECK(island_window_start(c, 1) == 61520.0);
}

TEST_CASE("sequence evaluation with the shaping objective") {
    const PlanetSystem sys;
    RtbaConfig c;
    c.p = 2;
    c.sga.population_size = 12;
    c.sga.generations = 3;
    c.window_end = 61520.0;
    const auto r = evaluate_sequence(sys, Sequence::parse("EMJ"), c);
    CHECK(r.island_dvs.size() == 2);
    CHECK(r.best_genes.size() == gene_count(Sequence::parse("EMJ"), c.ltto));
    CHECK(r.f_s >= r.min_dv());
    c.p = 1;
    c.chi = 1.0;
    const auto one = evaluate_sequence(sys, Sequence::parse("EJ"), c);
    CHECK(one.f_s == one.island_dvs[0]);
    CHECK(target_body_key(Sequence::parse("EMJ"), 0) == "M");
    CHECK(target_body_key(Sequence::parse("EJ"), 0) == "-");
}

TEST_CASE("configuration checks") {
    RtbaConfig c;
    CHECK_NOTHROW(c.validate());
    c.q = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RtbaConfig{};
    c.xi = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RtbaConfig{};
    CHECK(c.concurrent_sequences() == 3);
}
