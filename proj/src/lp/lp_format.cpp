#include "mgres/lp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace mgres::lp {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Appends "_<k>" to names already taken so sanitization never merges two names.
class NameTable {
public:
    std::string operator()(const std::string& raw, const char* fallback, std::size_t idx) {
        std::string s = raw.empty() ? std::string(fallback) + std::to_string(idx) : sanitize_lp_name(raw);
        auto [it, fresh] = used_.emplace(s, 0);
        if (fresh) return s;
        for (;;) {
            std::string alt = s + "_" + std::to_string(++it->second);
            if (used_.emplace(alt, 0).second) return alt;
        }
    }

private:
    std::unordered_map<std::string, int> used_;
};

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
    std::size_t on_line = 0;
    bool first = true;
    for (const auto& [c, name] : terms) {
        if (c == 0.0) continue;
        if (!first) out << (c < 0 ? " - " : " + ");
        else if (c < 0) out << "- ";
        out << num(std::abs(c)) << ' ' << name;
        first = false;
        if (++on_line % 8 == 0) out << "\n   ";
    }
    if (first) out << "0 " << (terms.empty() ? std::string("x0") : terms.front().second);
}

}  // namespace

std::string sanitize_lp_name(const std::string& name) {
    std::string s;
    s.reserve(name.size());
    for (char ch : name) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '_' || c == '.') s.push_back(ch);
        else s.push_back('_');
    }
    if (s.empty()) s = "_";
    const auto c0 = static_cast<unsigned char>(s[0]);
    if (std::isdigit(c0) || s[0] == '.' || s[0] == 'e' || s[0] == 'E') s.insert(s.begin(), '_');
    return s;
}

void write_lp_format(const LinearProgram& lp, std::ostream& out) {
    NameTable vnames;
    std::vector<std::string> vn(lp.num_variables());
    for (std::size_t j = 0; j < vn.size(); ++j) vn[j] = vnames(lp.variable(j).name, "x", j);
    NameTable rnames;

    out << "\\ objective offset " << num(lp.objective_offset()) << "\n";
    out << "Minimize\n obj: ";
    std::vector<std::pair<double, std::string>> terms;
    for (std::size_t j = 0; j < vn.size(); ++j)
        if (lp.objective()[j] != 0.0) terms.emplace_back(lp.objective()[j], vn[j]);
    if (terms.empty() && !vn.empty()) terms.emplace_back(0.0, vn[0]);
    write_terms(out, terms);
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        const auto& r = lp.row(i);
        out << ' ' << rnames(r.name, "r", i) << ": ";
        terms.clear();
        for (const auto& t : r.terms) terms.emplace_back(t.coef, vn[t.var]);
        write_terms(out, terms);
        out << ' ' << to_string(r.relation) << ' ' << num(r.rhs) << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < vn.size(); ++j) {
        const auto& v = lp.variable(j);
        const bool lo = std::isfinite(v.lower);
        const bool hi = std::isfinite(v.upper);
        if (!lo && !hi) out << ' ' << vn[j] << " free\n";
        else if (lo && hi && v.lower == v.upper) out << ' ' << vn[j] << " = " << num(v.lower) << '\n';
        else {
            out << ' ' << (lo ? num(v.lower) : std::string("-inf")) << " <= " << vn[j];
            if (hi) out << " <= " << num(v.upper);
            out << '\n';
        }
    }
    out << "End\n";
}

}  // namespace mgres::lp
