// bfv: back-and-forth verification tool.
//
// Subcommands: bf, ef, lemma32, lemma33, crossed, r0, ralpha, selftest.
// Output is TSV with '#'-prefixed header lines.  Exit codes:
//   0 all checks pass; 1 lemma-check failure; 2 input/certificate error;
//   3 resource-cap abort.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bfv/contbf.hpp"
#include "bfv/games.hpp"
#include "bfv/report.hpp"
#include "bfv/suites.hpp"

using namespace bfv;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int emit(Report& rep, const std::string& out) {
    if (out.empty())
        std::cout << rep.str();
    else
        rep.write_file(out);
    return rep.exit_status();
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

Rational parse_rational(const std::string& s) {
    GaussScalar v = parse_scalar(s);
    if (!(v.im == 0)) throw std::invalid_argument("expected a real rational: " + s);
    return v.re;
}

// A tracial tuple literal.  Group algebra: "galg(<group expr>) : w1, w2, ..."
// with words per the group mini-language.  Multi-matrix: "mm(2:1/2,1:1/2) :
// [[1,i],[0,2]]#[[1]] ; ..." — per coordinate, one matrix literal per block
// separated by '#', coordinates separated by ';'.
TracialTuple parse_tuple_literal(const std::string& text) {
    size_t colon = text.find(':');
    // the algebra descriptor itself contains ':' inside mm(...); find the
    // first ':' after the closing paren of the descriptor
    size_t open = text.find('(');
    if (open != std::string::npos) {
        int depth = 0;
        size_t i = open;
        for (; i < text.size(); ++i) {
            if (text[i] == '(') ++depth;
            if (text[i] == ')' && --depth == 0) break;
        }
        colon = text.find(':', i);
    }
    if (colon == std::string::npos)
        throw std::invalid_argument("tuple literal needs '<algebra> : <entries>'");
    std::string alg = text.substr(0, colon);
    std::string entries = text.substr(colon + 1);
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\n");
        size_t b = s.find_last_not_of(" \t\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    alg = trim(alg);
    if (alg.rfind("mm(", 0) == 0) {
        MMPtr m = parse_mm(alg);
        std::vector<MatElement> xs;
        std::stringstream ss(entries);
        std::string coord;
        while (std::getline(ss, coord, ';')) {
            coord = trim(coord);
            if (coord.empty()) continue;
            MatElement x = mat_zero(m);
            std::stringstream bs(coord);
            std::string blk;
            size_t b = 0;
            while (std::getline(bs, blk, '#')) {
                blk = trim(blk);
                if (b >= m->sizes.size())
                    throw std::invalid_argument("matrix literal: too many blocks");
                // [[a,b],[c,d]] — strip outer brackets, split rows on "],["
                if (blk.size() < 4 || blk.front() != '[' || blk.back() != ']')
                    throw std::invalid_argument("matrix literal: expected [[...],[...]]");
                std::string body = blk.substr(1, blk.size() - 2);
                std::vector<std::string> rows;
                size_t pos = 0;
                while (pos < body.size()) {
                    size_t lb = body.find('[', pos);
                    if (lb == std::string::npos) break;
                    size_t rb = body.find(']', lb);
                    if (rb == std::string::npos)
                        throw std::invalid_argument("matrix literal: unbalanced row");
                    rows.push_back(body.substr(lb + 1, rb - lb - 1));
                    pos = rb + 1;
                }
                if ((int)rows.size() != m->sizes[b])
                    throw std::invalid_argument("matrix literal: row count != block size");
                for (int r = 0; r < m->sizes[b]; ++r) {
                    auto cells = split_csv(rows[r]);
                    if ((int)cells.size() != m->sizes[b])
                        throw std::invalid_argument("matrix literal: column count != block size");
                    for (int c = 0; c < m->sizes[b]; ++c)
                        x.blocks[b][r][c] = parse_scalar(cells[c]);
                }
                ++b;
            }
            if ((int)b != (int)m->sizes.size())
                throw std::invalid_argument("matrix literal: missing blocks");
            xs.push_back(std::move(x));
        }
        return mm_tuple(m, std::move(xs));
    }
    std::string expr = alg;
    if (expr.rfind("galg(", 0) == 0 && expr.back() == ')')
        expr = expr.substr(5, expr.size() - 6);
    GroupPtr g = parse_group_expr(expr);
    return group_tuple_words(g, parse_word_tuple(*g, entries));
}

std::string rbound_record(const std::string& tag, const RBound& r) {
    std::ostringstream os;
    os << r.value;
    return tsv({tag, "alpha=" + std::to_string(r.alpha), os.str(),
                r.exact_zero ? "exact-zero" : ("exact=" + r.exact_value.get_str()),
                r.best_formula.empty() ? "-" : r.best_formula, r.resolution});
}

int run(int argc, char** argv) {
    CLI::App app{"back-and-forth verification tool"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "key=value config file; flags win");
    app.require_subcommand(1);

    uint64_t seed = 1;
    int degree = 6, moments = 6, radius = 6, wordlen = 8, alpha = 2, cap = 3;
    std::string out;
    app.add_option("--seed", seed, "RNG seed (splitmix64 streams)");
    app.add_option("--degree", degree, "polynomial / formula degree cap D");
    app.add_option("--moments", moments, "moment order cap K");
    app.add_option("--radius", radius, "Rayleigh ball radius R");
    app.add_option("--wordlen", wordlen, "word-length cap L");
    app.add_option("--alpha", alpha, "back-and-forth level");
    app.add_option("--cap", cap, "level / resource cap");
    app.add_option("--out", out, "write the report to this file instead of stdout");

    // ---- bf ----
    auto* bf = app.add_subcommand("bf", "games on finite structures");
    std::string mode = "sym", pool_file, left_file, right_file;
    int rounds = 3;
    bf->add_option("--mode", mode, "sym|asym|rank|ef|karp|consistency")
        ->check(CLI::IsMember({"sym", "asym", "rank", "ef", "karp", "consistency"}));
    bf->add_option("--rounds", rounds, "EF game rounds");
    bf->add_option("--pool", pool_file, "formula pool file (ef, karp)");
    bf->add_option("left", left_file, "left structure file")->required();
    bf->add_option("right", right_file, "right structure file")->required();

    // ---- ef (alias for bf --mode ef) ----
    auto* ef = app.add_subcommand("ef", "n-round single-element EF game");
    std::string ef_left, ef_right, ef_pool;
    ef->add_option("--rounds", rounds, "EF game rounds");
    ef->add_option("--pool", ef_pool, "winning-condition formula pool file")->required();
    ef->add_option("left", ef_left, "left structure file")->required();
    ef->add_option("right", ef_right, "right structure file")->required();

    // ---- lemma32 / lemma33 ----
    auto* l32 = app.add_subcommand("lemma32", "trace preservation suite (Lemma 3.2)");
    std::string recipes_csv;
    int polys = 100, vars = 4, terms = 3;
    l32->add_option("--recipes", recipes_csv, "comma-separated recipe names");
    l32->add_option("--polys", polys, "polynomials per recipe");
    l32->add_option("--vars", vars, "polynomial variable cap");
    l32->add_option("--terms", terms, "coefficient terms per variable cap");

    auto* l33 = app.add_subcommand("lemma33", "moment/norm preservation suite (Lemma 3.3/3.4)");
    int polys33 = 20;
    l33->add_option("--recipes", recipes_csv, "comma-separated recipe names");
    l33->add_option("--polys", polys33, "polynomials per recipe");

    // ---- crossed ----
    auto* cr = app.add_subcommand("crossed", "Bernoulli crossed-product suite (Lemma 6.1/Thm 6.4)");
    int count = 200;
    cr->add_option("--count", count, "instance count");

    // ---- r0 / ralpha ----
    auto* r0c = app.add_subcommand("r0", "r_0 lower bound (Lemma 4.2 base case)");
    std::string left_tuple, right_tuple;
    r0c->add_option("--left", left_tuple, "left tuple literal '<algebra> : <entries>'");
    r0c->add_option("--right", right_tuple, "right tuple literal");

    auto* rac = app.add_subcommand("ralpha", "r_alpha lower bound via pooled moves");
    std::string eps_str = "1/4";
    std::vector<std::string> move_strs;
    rac->add_option("--left", left_tuple, "left tuple literal")->required();
    rac->add_option("--right", right_tuple, "right tuple literal")->required();
    rac->add_option("--eps", eps_str, "net mesh epsilon (rational)");
    rac->add_option("--move", move_strs,
                    "pooled Spoiler move 'L:<entries>' or 'R:<entries>' in the matching algebra");

    // ---- selftest ----
    auto* st = app.add_subcommand("selftest", "fast cross-module self test");

    // common flags may also be given after the subcommand name
    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInput;
    }

    if (*bf || *ef) {
        if (*ef) {
            mode = "ef";
            left_file = ef_left;
            right_file = ef_right;
            pool_file = ef_pool;
        }
        FinStructure s = parse_structure(slurp(left_file));
        FinStructure t = parse_structure(slurp(right_file));
        Report rep;
        rep.add_header("suite", "bf");
        rep.add_header("mode", mode);
        rep.add_header("lemma", mode == "ef" ? "Fact 2.2" : "Def 2.4");
        rep.add_header("left", s.name);
        rep.add_header("right", t.name);
        SortedTuple empty;
        if (mode == "sym" || mode == "asym") {
            GameSolver solver(s, t);
            Transcript tr;
            bool ok = mode == "sym" ? solver.bf_sym(empty, empty, alpha, &tr)
                                    : solver.bf_asym(empty, empty, alpha);
            rep.add_header("alpha", std::to_string(alpha));
            // the verdict is the record: exit 0 iff equivalent
            rep.add_record(tsv({mode, std::to_string(alpha), ok ? "EQUIVALENT" : "NOT-EQUIVALENT"}),
                           ok);
            if (mode == "sym") {
                std::stringstream ss(tr.str());
                std::string l;
                while (std::getline(ss, l)) rep.add_record("transcript\t" + l, true);
            }
            return emit(rep, out);
        }
        if (mode == "rank") {
            Rank r = bf_rank(s, t, cap);
            rep.add_header("cap", std::to_string(cap));
            rep.add_record(tsv({"rank", r.str()}), true);
            return emit(rep, out);
        }
        if (mode == "ef") {
            auto pool = parse_pool(slurp(pool_file), s.sig);
            std::vector<Formula> phi;
            for (auto& tf : pool) phi.push_back(tf.formula);
            Transcript tr;
            Winner w = ef_winner(s, t, phi, rounds, &tr);
            rep.add_header("rounds", std::to_string(rounds));
            rep.add_record(tsv({"ef", w == Winner::Duplicator ? "DUPLICATOR" : "SPOILER"}),
                           w == Winner::Duplicator);
            return emit(rep, out);
        }
        if (mode == "karp") {
            auto pool = pool_file.empty() ? karp_pool(s.sig) : parse_pool(slurp(pool_file), s.sig);
            auto violations = karp_check(s, empty, t, empty, alpha, pool);
            rep.add_header("alpha", std::to_string(alpha));
            rep.add_header("pool_size", std::to_string(pool.size()));
            for (auto& v : violations) rep.add_record(tsv({"violation", v.what}), false);
            rep.add_record(tsv({"karp", std::to_string(violations.size()) + " violations"}),
                           violations.empty());
            return emit(rep, out);
        }
        // consistency
        auto violations = relation_consistency(s, t, cap);
        rep.add_header("cap", std::to_string(cap));
        for (auto& v : violations) rep.add_record(tsv({"violation", v.what}), false);
        rep.add_record(tsv({"consistency", std::to_string(violations.size()) + " violations"}),
                       violations.empty());
        return emit(rep, out);
    }

    std::vector<std::string> recipes =
        recipes_csv.empty() ? default_recipes() : split_csv(recipes_csv);

    if (*l32) {
        Report rep = suite_lemma32(seed, recipes, polys, degree, vars, terms);
        return emit(rep, out);
    }
    if (*l33) {
        Report rep = suite_lemma33(seed, recipes, polys33, moments);
        return emit(rep, out);
    }
    if (*cr) {
        Report rep = suite_crossed(seed, count, moments);
        return emit(rep, out);
    }
    if (*r0c) {
        Report rep;
        if (left_tuple.empty() != right_tuple.empty())
            throw std::invalid_argument("r0: give both --left and --right, or neither");
        if (left_tuple.empty()) {
            rep = suite_r0(degree);
        } else {
            rep.add_header("suite", "r0");
            rep.add_header("lemma", "4.2");
            rep.add_header("config", "degree=" + std::to_string(degree));
            TracialTuple a = parse_tuple_literal(left_tuple);
            TracialTuple b = parse_tuple_literal(right_tuple);
            RBound r = r0_lower(a, b, degree);
            rep.add_record(rbound_record(a.algebra_name() + " vs " + b.algebra_name(), r), true);
        }
        return emit(rep, out);
    }
    if (*rac) {
        TracialTuple a = parse_tuple_literal(left_tuple);
        TracialTuple b = parse_tuple_literal(right_tuple);
        std::vector<PoolMove> pools;
        for (auto& m : move_strs) {
            if (m.size() < 2 || (m[0] != 'L' && m[0] != 'R') || m[1] != ':')
                throw std::invalid_argument("move literal must start with 'L:' or 'R:'");
            PoolMove pm;
            pm.side = m[0] == 'L' ? 0 : 1;
            const TracialTuple& host = pm.side == 0 ? a : b;
            std::string entries = m.substr(2);
            if (host.kind == TracialTuple::Kind::GroupAlgebra)
                pm.tuple = group_tuple_words(host.group, parse_word_tuple(*host.group, entries));
            else
                pm.tuple = parse_tuple_literal(host.mm->descriptor() + " : " + entries);
            pools.push_back(std::move(pm));
        }
        Report rep;
        rep.add_header("suite", "ralpha");
        rep.add_header("lemma", "4.2 / Def of r_alpha");
        rep.add_header("config", "alpha=" + std::to_string(alpha) + ";degree=" +
                                     std::to_string(degree) + ";eps=" + eps_str +
                                     ";moves=" + std::to_string(pools.size()));
        RBound r = r_alpha_lower(a, b, alpha, pools, parse_rational(eps_str),
                                 WeakModulus::lipschitz(), degree);
        rep.add_record(rbound_record(a.algebra_name() + " vs " + b.algebra_name(), r), true);
        return emit(rep, out);
    }
    if (*st) {
        Report rep = suite_selftest(seed);
        return emit(rep, out);
    }
    return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("cap") != std::string::npos) return kExitCap;
        return kExitLemmaFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
