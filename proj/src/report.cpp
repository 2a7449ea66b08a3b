#include "bfv/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bfv {

void Report::merge(const Report& o) {
    for (const auto& kv : o.header) header.push_back(kv);
    for (const auto& r : o.records) records.push_back(r);
    pass += o.pass;
    fail += o.fail;
}

std::string Report::str() const {
    std::ostringstream os;
    os << "# tool\t" << kToolVersion << "\n";
    for (const auto& [k, v] : header) os << "# " << k << "\t" << v << "\n";
    for (const auto& r : records) os << r << "\n";
    os << "# summary\tpass=" << pass << "\tfail=" << fail << "\tstatus="
       << (fail == 0 ? "PASS" : "FAIL") << "\n";
    return os.str();
}

void Report::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << str();
}

std::string tsv(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line += '\t';
        line += fields[i];
    }
    return line;
}

}  // namespace bfv
