// Acceptance gate: one pass/fail line per criterion.  Exit 0 iff all pass.

#include <chrono>
#include <iostream>

#include "bfv/suites.hpp"

using namespace bfv;

namespace {

int failures = 0;

void criterion(int n, const std::string& what, bool ok, double seconds, const std::string& extra) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << n << ": " << what << " (" << extra
              << ", " << seconds << "s)" << std::endl;
    if (!ok) ++failures;
}

template <class F>
void run(int n, const std::string& what, F&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string extra;
    try {
        auto [o, e] = fn();
        ok = o;
        extra = e;
    } catch (const std::exception& e) {
        extra = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    criterion(n, what, ok, dt, extra);
}

std::string counts(const Report& r) {
    return std::to_string(r.pass) + "/" + std::to_string(r.pass + r.fail);
}

}  // namespace

int main() {
    const std::vector<std::string> recipes = {"free-embed", "abelian-ambient", "freeprod-mixed",
                                              "direct-product", "graph-product"};

    run(1, "Lemma 3.2 trace suite, 100 polynomials x 5 recipes, exact", [&] {
        Report r = suite_lemma32(1, recipes, 100, 6, 4, 3);
        return std::pair(r.fail == 0 && r.pass == 500, counts(r));
    });

    run(2, "Lemma 3.3/3.4 moments k=1..6 + finite norms, 20 polynomials per recipe", [&] {
        auto rs = recipes;
        rs.push_back("finite-relabel");  // exercises the norm_exact_finite path
        Report r = suite_lemma33(1, rs, 20, 6);
        return std::pair(r.fail == 0 && r.pass == 120, counts(r));
    });

    run(3, "oracle equivalence of the two trace paths, 1000 instances", [&] {
        Report r = suite_oracle(1, 1000);
        return std::pair(r.fail == 0 && r.pass == 1000, counts(r));
    });

    run(4, "finite Scott property: bf_sym(alpha=2) iff isomorphic, exhaustive corpus", [&] {
        Report r = suite_scott(2);
        return std::pair(r.fail == 0 && r.pass > 0, counts(r));
    });

    run(5, "relation inter-simulation at cap 3, same corpus", [&] {
        Report r = suite_intersim(3);
        return std::pair(r.fail == 0 && r.pass > 0, counts(r));
    });

    run(6, "Karp transfer over a >=50-formula Sigma_1/Sigma_2 pool", [&] {
        Report r = suite_karp(2);
        bool pool_ok = false;
        for (auto& [k, v] : r.header)
            if (k == "pool_size" && std::stoi(v) >= 50) pool_ok = true;
        return std::pair(r.fail == 0 && r.pass > 0 && pool_ok, counts(r));
    });

    run(7, "tuple-move reduction equals naive oracle on all structures of size <= 3", [&] {
        Report r = suite_reduction(2, 3, 3);
        return std::pair(r.fail == 0, counts(r));
    });

    run(8, "norm bounds sanity for u_1 + u_{-1} in Z", [&] {
        Report r = suite_normbounds();
        return std::pair(r.fail == 0 && r.pass == 3, counts(r));
    });

    run(9, "crossed-product suite, 200 instances + byte-identical trivial reduction", [&] {
        Report r = suite_crossed(1, 200, 2);
        return std::pair(r.fail == 0 && r.pass == 201, counts(r));
    });

    run(10, "r0 base case: exact zero on matched pairs, >= 0.4 for C2 vs C3 at D=3", [&] {
        Report r = suite_r0(3);
        return std::pair(r.fail == 0 && r.pass > 0, counts(r));
    });

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "FAILURES: " + std::to_string(failures))
              << std::endl;
    return failures == 0 ? 0 : 1;
}
