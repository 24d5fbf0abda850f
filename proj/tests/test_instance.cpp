#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "scirp/instance.hpp"

using namespace scirp;

namespace {

const std::string kAppendix = std::string(SCIRP_DATA_DIR) + "/appendix_a.json";

bool contains(const std::vector<std::string>& errs, const std::string& needle) {
    for (const auto& e : errs)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("appendix fixture loads and validates") {
    const Instance inst = load_instance(kAppendix);
    CHECK(validate(inst).empty());
    CHECK(inst.T == 7);
    CHECK(inst.num_customers() == 3);
    CHECK(inst.h == 0.2);
    CHECK(inst.e == 25);
    CHECK(inst.Q == 1200);
    CHECK(inst.producer.capacity == 4500);
    CHECK(inst.producer.supply.mean == 850);
    CHECK(inst.distance(1, 2) == 3);
    CHECK(inst.distance(0, 3) == 3);
    CHECK_THROWS(load_instance("/nonexistent/instance.json"));
}

TEST_CASE("generate applies the base-system defaults") {
    const Instance inst = generate(7, 15, 7);
    CHECK(validate(inst).empty());
    CHECK(inst.W == 100);
    CHECK(inst.w == 20);
    CHECK(inst.e == 10);
    CHECK(inst.Q == 1000);
    CHECK(inst.h == 0.05);
    CHECK(inst.alpha == 0.95);
    CHECK(inst.gamma == 0.9);
    CHECK(inst.producer.capacity == 4500);
    CHECK(inst.producer.K1 == 3000);
    CHECK(inst.producer.K2 == 15000);
    CHECK(inst.producer.b1 == 25);
    CHECK(inst.producer.b2 == 2);
    double total = 0;
    for (const auto& c : inst.customers) {
        CHECK(c.capacity == 1000);
        CHECK(c.demand.mean >= 100);
        CHECK(c.demand.mean <= 400);
        CHECK(c.demand.std >= 0.025 * c.demand.mean - 1e-9);
        CHECK(c.demand.std <= 0.05 * c.demand.mean + 1e-9);
        CHECK(*c.x >= 0);
        CHECK(*c.x <= 10);
        total += c.demand.mean;
    }
    CHECK(inst.producer.supply.mean == doctest::Approx(total));
    CHECK(inst.producer.supply.std == doctest::Approx(0.15 * total));
}

TEST_CASE("generate is deterministic and seed sensitive") {
    const auto a = instance_to_json(generate(3, 10, 7)).dump();
    CHECK(a == instance_to_json(generate(3, 10, 7)).dump());
    CHECK(a != instance_to_json(generate(4, 10, 7)).dump());
    CHECK_THROWS_AS(generate(1, 0, 7), std::invalid_argument);
    CHECK_THROWS_AS(generate(1, 3, 0), std::invalid_argument);
}

TEST_CASE("generated distances are Euclidean from a central producer") {
    const Instance inst = generate(9, 8, 7);
    for (std::size_t i = 0; i <= 8; ++i) {
        CHECK(inst.distance(i, i) == 0.0);
        for (std::size_t j = 0; j <= 8; ++j) {
            CHECK(inst.distance(i, j) == inst.distance(j, i));
            for (std::size_t k = 0; k <= 8; ++k)
                CHECK(inst.distance(i, k) <= inst.distance(i, j) + inst.distance(j, k) + 1e-9);
        }
    }
    const auto& c = inst.customers[0];
    CHECK(inst.distance(0, 1) == doctest::Approx(std::hypot(*c.x - 5.0, *c.y - 5.0)));
}

TEST_CASE("high uncertainty widens demand variation") {
    GenerateParams p;
    p.uncertainty = GenerateParams::Uncertainty::High;
    const Instance inst = generate(2, 40, 7, p);
    double lo = 1, hi = 0;
    for (const auto& c : inst.customers) {
        lo = std::min(lo, c.demand.std / c.demand.mean);
        hi = std::max(hi, c.demand.std / c.demand.mean);
    }
    CHECK(lo >= 0.02 - 1e-12);
    CHECK(hi <= 0.1 + 1e-12);
    CHECK(hi > 0.05);
}

TEST_CASE("json round trip preserves the instance") {
    for (const Instance& inst : {load_instance(kAppendix), generate(5, 6, 5)}) {
        const auto j = instance_to_json(inst);
        const Instance back = instance_from_json(j);
        CHECK(instance_to_json(back) == j);
        CHECK(back.distances == inst.distances);
    }
    const auto path = std::filesystem::temp_directory_path() / "scirp_instance_roundtrip.json";
    const Instance inst = generate(5, 6, 5);
    save_instance(inst, path.string());
    CHECK(instance_to_json(load_instance(path.string())) == instance_to_json(inst));
    std::filesystem::remove(path);
}

TEST_CASE("scale composes multiplicatively") {
    const Instance base = generate(12, 6, 7);
    std::mt19937_64 rng(1);
    const double pow2[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    std::uniform_int_distribution<int> k(0, 5);
    for (int i = 0; i < 50; ++i) {
        // powers of two keep the products exact
        const double a1 = pow2[k(rng)], a2 = pow2[k(rng)], a3 = pow2[k(rng)];
        const double b1 = pow2[k(rng)], b2 = pow2[k(rng)], b3 = pow2[k(rng)];
        const Instance twice = scale(scale(base, a1, a2, a3), b1, b2, b3);
        const Instance once = scale(base, a1 * b1, a2 * b2, a3 * b3);
        CHECK(instance_to_json(twice) == instance_to_json(once));
    }
    const Instance s = scale(base, 1.2, 0.5, 2.0);
    CHECK(s.producer.supply.mean == doctest::Approx(1.2 * base.producer.supply.mean));
    CHECK(s.producer.supply.std == doctest::Approx(0.6 * base.producer.supply.std));
    CHECK(s.customers[0].demand.std == doctest::Approx(2.0 * base.customers[0].demand.std));
    CHECK(s.customers[0].demand.mean == base.customers[0].demand.mean);
    CHECK(instance_to_json(scale(base, 1, 1, 1)) == instance_to_json(base));
    CHECK_THROWS_AS(scale(base, -1, 1, 1), std::invalid_argument);
}

TEST_CASE("validate reports broken instances") {
    const Instance good = load_instance(kAppendix);
    {
        Instance i = good;
        i.distances[0][1] = 9;
        CHECK(contains(validate(i), "symmetric"));
    }
    {
        Instance i = good;
        i.producer.b2 = 20;
        CHECK(contains(validate(i), "b2"));
    }
    {
        Instance i = good;
        i.customers[1].id = 1;
        CHECK(contains(validate(i), "duplicate"));
    }
    {
        Instance i = good;
        i.customers[2].capacity = 100;
        CHECK(contains(validate(i), "exceeds capacity"));
    }
    {
        Instance i = good;
        i.Q = 300;
        CHECK(contains(validate(i), "cc2"));
    }
    {
        Instance i = good;
        i.alpha = 1.0;
        CHECK(contains(validate(i), "alpha"));
    }
    {
        Instance i = good;
        i.distances.clear();
        CHECK(contains(validate(i), "distances missing"));
    }
    {
        Instance i = good;
        i.distances.pop_back();
        CHECK(contains(validate(i), "(N+1)x(N+1)"));
    }
}
