#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fracpme/entropy.hpp"

namespace fracpme {

inline void write_records_csv(const std::string& path,
                              const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open '" + path + "' for writing");
    out << DiagnosticsRecord::csv_header() << '\n';
    out << std::setprecision(17);
    for (const auto& r : records) {
        out << r.t << ',' << r.tau << ',' << r.mass << ',' << r.l1 << ',' << r.l2 << ','
            << r.linf << ',' << r.H << ',' << r.I << ',' << r.H_rel << ',' << r.hneg_s_sq
            << ',' << r.w2 << ',' << r.m2 << ',' << r.m2n << ',' << r.min_density << ','
            << r.support_radius << '\n';
    }
}

inline std::vector<DiagnosticsRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw validation_error("empty CSV '" + path + "'");
    if (line != DiagnosticsRecord::csv_header())
        throw validation_error("unexpected CSV header in '" + path + "'");
    std::vector<DiagnosticsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        double vals[15];
        for (int i = 0; i < 15; ++i) {
            if (!std::getline(ls, tok, ','))
                throw validation_error("short CSV row in '" + path + "'");
            vals[i] = std::stod(tok);
        }
        DiagnosticsRecord r;
        r.t = vals[0]; r.tau = vals[1]; r.mass = vals[2]; r.l1 = vals[3];
        r.l2 = vals[4]; r.linf = vals[5]; r.H = vals[6]; r.I = vals[7];
        r.H_rel = vals[8]; r.hneg_s_sq = vals[9]; r.w2 = vals[10]; r.m2 = vals[11];
        r.m2n = vals[12]; r.min_density = vals[13]; r.support_radius = vals[14];
        records.push_back(r);
    }
    return records;
}

}  // namespace fracpme
