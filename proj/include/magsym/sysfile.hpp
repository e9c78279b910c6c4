#ifndef MAGSYM_SYSFILE_HPP
#define MAGSYM_SYSFILE_HPP

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "magsym/parser.hpp"

namespace magsym {

/// A system description file, before symbol resolution.
///
/// Format (line oriented, '#' comments):
///
///   [system]
///   name = landau
///   frame = cartesian
///
///   [params]
///   b : real
///   w1 : complex
///
///   [functions]
///   W3(x3) : real
///
///   [potential]
///   A = -b*x2/2, b*x1/2, 0
///   W = w1/(x1^2 + x2^2)
///
///   [integrals]
///   Y1 = pA1 + I*pA2
///
///   [expected]
///   commute = Y1, Y2
struct SystemFile {
    std::string name;
    std::string frame = "cartesian";
    std::vector<std::pair<std::string, Reality>> params;
    // name, argument coordinate names, reality
    std::vector<std::tuple<std::string, std::vector<std::string>, Reality>>
        functions;
    std::array<std::string, 3> A{"0", "0", "0"};
    std::string W = "0";
    std::vector<std::pair<std::string, std::string>> integrals;
    std::vector<std::pair<std::string, std::string>> expected;
};

struct Diagnostic {
    int line = 0;
    std::string message;
    std::string str() const {
        return "line " + std::to_string(line) + ": " + message;
    }
};

struct SysParseResult {
    std::optional<SystemFile> file;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return file.has_value() && diagnostics.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace detail

/// Parse a system file.  All recoverable errors are aggregated into
/// `diagnostics`; `file` is absent only if the section structure itself is
/// broken.
inline SysParseResult parse_system_file(const std::string& text) {
    using detail::split_top;
    using detail::trim;
    SysParseResult res;
    SystemFile sf;
    std::vector<Diagnostic>& diag = res.diagnostics;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    bool saw_A = false, saw_W = false;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                diag.push_back({lineno, "malformed section header"});
                continue;
            }
            section = line.substr(1, line.size() - 2);
            if (section != "system" && section != "params" &&
                section != "functions" && section != "potential" &&
                section != "integrals" && section != "expected")
                diag.push_back({lineno, "unknown section [" + section + "]"});
            continue;
        }
        if (section.empty()) {
            diag.push_back({lineno, "content before first section header"});
            continue;
        }
        if (section == "params" || section == "functions") {
            auto parts = split_top(line, ':');
            if (parts.size() != 2) {
                diag.push_back({lineno, "expected 'name : real|complex'"});
                continue;
            }
            Reality re;
            if (parts[1] == "real") {
                re = Reality::Real;
            } else if (parts[1] == "complex") {
                re = Reality::Complex;
            } else {
                diag.push_back(
                    {lineno, "reality must be 'real' or 'complex', got '" +
                                 parts[1] + "'"});
                continue;
            }
            if (section == "params") {
                sf.params.emplace_back(parts[0], re);
            } else {
                size_t lp = parts[0].find('(');
                if (lp == std::string::npos || parts[0].back() != ')') {
                    diag.push_back(
                        {lineno, "function declaration needs an argument "
                                 "list, e.g. W3(x3)"});
                    continue;
                }
                std::string fname = trim(parts[0].substr(0, lp));
                std::string args =
                    parts[0].substr(lp + 1, parts[0].size() - lp - 2);
                sf.functions.emplace_back(fname, split_top(args, ','), re);
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            diag.push_back({lineno, "expected 'key = value'"});
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section == "system") {
            if (key == "name") {
                sf.name = val;
            } else if (key == "frame") {
                if (val != "cartesian" && val != "cylindrical")
                    diag.push_back({lineno, "frame must be 'cartesian' or "
                                            "'cylindrical'"});
                else
                    sf.frame = val;
            } else {
                diag.push_back({lineno, "unknown key '" + key + "'"});
            }
        } else if (section == "potential") {
            if (key == "A") {
                auto comps = split_top(val, ',');
                if (comps.size() != 3) {
                    diag.push_back(
                        {lineno,
                         "vector_potential requires 3 components, got " +
                             std::to_string(comps.size())});
                } else {
                    sf.A = {comps[0], comps[1], comps[2]};
                    saw_A = true;
                }
            } else if (key == "W") {
                sf.W = val;
                saw_W = true;
            } else {
                diag.push_back({lineno, "unknown key '" + key + "'"});
            }
        } else if (section == "integrals") {
            sf.integrals.emplace_back(key, val);
        } else { // expected
            sf.expected.emplace_back(key, val);
        }
    }

    if (sf.name.empty()) diag.push_back({0, "missing [system] name"});
    if (!saw_A && !saw_W)
        diag.push_back({0, "missing [potential] section"});

    // Symbol resolution: parse every expression to surface identifier and
    // syntax errors with their source line.
    ParseContext ctx = ParseContext::basic();
    for (auto& [n, re] : sf.params) ctx.param(n, re);
    for (auto& [n, argnames, re] : sf.functions) {
        std::vector<VarId> args;
        bool good = true;
        for (auto& an : argnames) {
            auto it = ctx.idents.find(an);
            if (it == ctx.idents.end() ||
                vars().info(it->second).kind != VarKind::Coordinate) {
                diag.push_back({0, "function '" + n + "': argument '" + an +
                                       "' is not a coordinate"});
                good = false;
            } else {
                args.push_back(it->second);
            }
        }
        if (good) ctx.func(n, args, re);
    }
    auto check = [&](const std::string& what, const std::string& src,
                     bool momenta) {
        ParseContext c = ctx;
        c.allow_momenta = momenta;
        if (momenta)
            for (int j = 0; j < 3; ++j) {
                ParseContext plain = ctx;
                try {
                    c.vector_potential[j] = parse_expr(sf.A[j], plain);
                } catch (const Error&) {
                    c.vector_potential[j] = nullptr;
                }
            }
        try {
            parse_expr(src, c);
        } catch (const Error& e) {
            diag.push_back({0, what + ": " + e.what()});
        }
    };
    if (saw_A)
        for (int j = 0; j < 3; ++j)
            check("A component " + std::to_string(j + 1), sf.A[j], false);
    if (saw_W) check("W", sf.W, false);
    for (auto& [n, src] : sf.integrals) check("integral " + n, src, true);

    res.file = std::move(sf);
    return res;
}

} // namespace magsym

#endif
