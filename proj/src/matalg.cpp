#include "bfv/matalg.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace bfv {

std::string MultiMatrixAlgebra::descriptor() const {
    std::string s = "mm(";
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(sizes[i]) + ":" + weights[i].get_str();
    }
    return s + ")";
}

int MultiMatrixAlgebra::real_dim() const {
    int d = 0;
    for (int n : sizes) d += 2 * n * n;
    return d;
}

MMPtr make_mm(std::vector<int> sizes, std::vector<Rational> weights) {
    if (sizes.empty() || sizes.size() != weights.size())
        throw std::invalid_argument("mm: need matching nonempty sizes and weights");
    Rational total = 0;
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw std::invalid_argument("mm: block sizes must be >= 1");
        if (weights[i] <= 0) throw std::invalid_argument("mm: weights must be positive");
        total += weights[i];
    }
    if (total != 1) throw std::invalid_argument("mm: weights must sum to 1");
    MultiMatrixAlgebra a;
    a.sizes = std::move(sizes);
    a.weights = std::move(weights);
    return std::make_shared<const MultiMatrixAlgebra>(std::move(a));
}

MMPtr parse_mm(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!isspace((unsigned char)c)) s += c;
    if (s.rfind("mm(", 0) != 0 || s.back() != ')')
        throw std::invalid_argument("mm descriptor must look like mm(2:1/2,1:1/2)");
    std::string body = s.substr(3, s.size() - 4);
    std::vector<int> sizes;
    std::vector<Rational> weights;
    std::istringstream bs(body);
    std::string part;
    while (std::getline(bs, part, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("mm descriptor entry needs size:weight: " + part);
        sizes.push_back(std::stoi(part.substr(0, colon)));
        Rational w;
        if (w.set_str(part.substr(colon + 1), 10) != 0)
            throw std::invalid_argument("bad mm weight: " + part);
        w.canonicalize();
        weights.push_back(w);
    }
    return make_mm(std::move(sizes), std::move(weights));
}

namespace {

void require_same(const MatElement& x, const MatElement& y) {
    if (!x.alg->same_as(*y.alg)) throw std::invalid_argument("matalg: descriptor mismatch");
}

}  // namespace

std::string MatElement::str() const {
    std::string s;
    for (size_t b = 0; b < blocks.size(); ++b) {
        if (b) s += " | ";
        s += "[";
        for (size_t r = 0; r < blocks[b].size(); ++r) {
            if (r) s += "; ";
            for (size_t c = 0; c < blocks[b][r].size(); ++c)
                s += (c ? "," : "") + blocks[b][r][c].str();
        }
        s += "]";
    }
    return s;
}

MatElement mat_zero(MMPtr a) {
    MatElement x;
    x.alg = std::move(a);
    for (int n : x.alg->sizes) x.blocks.push_back(GMatrix(n, std::vector<GaussScalar>(n)));
    return x;
}

MatElement mat_one(MMPtr a) {
    MatElement x = mat_zero(std::move(a));
    for (size_t b = 0; b < x.blocks.size(); ++b)
        for (size_t i = 0; i < x.blocks[b].size(); ++i) x.blocks[b][i][i] = GaussScalar(1);
    return x;
}

MatElement mat_unit(MMPtr a, int block, int row, int col) {
    MatElement x = mat_zero(std::move(a));
    x.blocks.at(block).at(row).at(col) = GaussScalar(1);
    return x;
}

MatElement mat_add(const MatElement& x, const MatElement& y) {
    require_same(x, y);
    MatElement r = x;
    for (size_t b = 0; b < r.blocks.size(); ++b)
        for (size_t i = 0; i < r.blocks[b].size(); ++i)
            for (size_t j = 0; j < r.blocks[b][i].size(); ++j) r.blocks[b][i][j] += y.blocks[b][i][j];
    return r;
}

MatElement mat_sub(const MatElement& x, const MatElement& y) {
    require_same(x, y);
    MatElement r = x;
    for (size_t b = 0; b < r.blocks.size(); ++b)
        for (size_t i = 0; i < r.blocks[b].size(); ++i)
            for (size_t j = 0; j < r.blocks[b][i].size(); ++j) r.blocks[b][i][j] -= y.blocks[b][i][j];
    return r;
}

MatElement mat_scale(const GaussScalar& c, const MatElement& x) {
    MatElement r = x;
    for (auto& blk : r.blocks)
        for (auto& row : blk)
            for (auto& v : row) v *= c;
    return r;
}

MatElement mat_mul(const MatElement& x, const MatElement& y) {
    require_same(x, y);
    MatElement r = mat_zero(x.alg);
    for (size_t b = 0; b < r.blocks.size(); ++b) {
        size_t n = r.blocks[b].size();
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) {
                if (x.blocks[b][i][k].is_zero()) continue;
                for (size_t j = 0; j < n; ++j)
                    r.blocks[b][i][j] += x.blocks[b][i][k] * y.blocks[b][k][j];
            }
    }
    return r;
}

MatElement mat_adjoint(const MatElement& x) {
    MatElement r = mat_zero(x.alg);
    for (size_t b = 0; b < r.blocks.size(); ++b) {
        size_t n = r.blocks[b].size();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) r.blocks[b][i][j] = x.blocks[b][j][i].conj();
    }
    return r;
}

GaussScalar mat_trace(const MatElement& x) {
    GaussScalar t;
    for (size_t b = 0; b < x.blocks.size(); ++b) {
        GaussScalar blk;
        for (size_t i = 0; i < x.blocks[b].size(); ++i) blk += x.blocks[b][i][i];
        Rational norm = x.alg->weights[b] / x.alg->sizes[b];
        t += GaussScalar(norm) * blk;
    }
    return t;
}

bool mat_is_zero(const MatElement& x) {
    for (auto& blk : x.blocks)
        for (auto& row : blk)
            for (auto& v : row)
                if (!v.is_zero()) return false;
    return true;
}

Rational mat_l2_sq(const MatElement& x) {
    Rational s = 0;
    for (size_t b = 0; b < x.blocks.size(); ++b) {
        Rational blk = 0;
        for (auto& row : x.blocks[b])
            for (auto& v : row) blk += v.abs2();
        s += x.alg->weights[b] / x.alg->sizes[b] * blk;
    }
    return s;
}

double mat_norm(const MatElement& x, double tol) {
    double best = 0;
    for (size_t b = 0; b < x.blocks.size(); ++b) {
        size_t n = x.blocks[b].size();
        std::vector<std::vector<std::complex<double>>> m(n,
                                                         std::vector<std::complex<double>>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                m[i][j] = {to_double(x.blocks[b][i][j].re), to_double(x.blocks[b][i][j].im)};
        auto apply = [&](const std::vector<std::complex<double>>& v, bool star) {
            std::vector<std::complex<double>> r(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    r[i] += (star ? std::conj(m[j][i]) : m[i][j]) * v[j];
            return r;
        };
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::vector<std::complex<double>> v(n);
            for (size_t i = 0; i < n; ++i)
                v[i] = attempt == 0 ? std::complex<double>(i == 0 ? 1.0 : 0.0)
                                    : std::complex<double>(1.0 + (double)(i % 5), 0.3 * (double)i);
            double last = -1;
            for (int it = 0; it < 10000; ++it) {
                double nv = 0;
                for (auto& c : v) nv += std::norm(c);
                nv = std::sqrt(nv);
                if (nv == 0) break;
                for (auto& c : v) c /= nv;
                auto mv = apply(v, false);
                double q = 0;
                for (auto& c : mv) q += std::norm(c);
                q = std::sqrt(q);
                if (last >= 0 && std::abs(q - last) <= tol * std::max(1.0, q)) {
                    best = std::max(best, q);
                    break;
                }
                last = q;
                best = std::max(best, q);
                v = apply(mv, true);
            }
        }
    }
    return best;
}

}  // namespace bfv
