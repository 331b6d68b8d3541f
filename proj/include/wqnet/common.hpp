#ifndef WQNET_COMMON_HPP
#define WQNET_COMMON_HPP

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wqnet {

// Error taxonomy maps one-to-one onto the CLI exit codes.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};
struct PlanningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Species { Chlorine = 0, Reactant = 1, Thm = 2 };
inline constexpr int kSpeciesCount = 3;

inline const char* species_name(Species s)
{
    switch (s) {
        case Species::Chlorine: return "chlorine";
        case Species::Reactant: return "reactant";
        case Species::Thm: return "thm";
    }
    return "?";
}

inline const char* species_prefix(Species s)
{
    switch (s) {
        case Species::Chlorine: return "cl";
        case Species::Reactant: return "fr";
        case Species::Thm: return "thm";
    }
    return "?";
}

// Bulk water properties. The dynamic viscosity default follows the value
// used throughout the reference formulas (3.6e-5 kg/m/s); it can be
// overridden from configuration.
struct FluidProps {
    double density = 998.4;     // kg/m^3
    double viscosity = 3.6e-5;  // kg/(m s)
};

namespace text {

inline std::string_view trim(std::string_view s)
{
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.emplace_back(trim(s.substr(pos)));
            break;
        }
        out.emplace_back(trim(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

inline double parse_double(std::string_view tok, const std::string& context)
{
    const std::string t{trim(tok)};
    if (t == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
        throw ParseError("expected a number in " + context + ", got '" + t + "'");
    return v;
}

inline long parse_int(std::string_view tok, const std::string& context)
{
    const std::string t{trim(tok)};
    long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
        throw ParseError("expected an integer in " + context + ", got '" + t + "'");
    return v;
}

// "key=value" token used by the record-per-line file formats.
inline std::pair<std::string, std::string> parse_kv(std::string_view tok, const std::string& context)
{
    size_t eq = tok.find('=');
    if (eq == std::string_view::npos)
        throw ParseError("expected key=value in " + context + ", got '" + std::string(tok) + "'");
    return {std::string(trim(tok.substr(0, eq))), std::string(trim(tok.substr(eq + 1)))};
}

inline std::string format_g(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace text

// Line-oriented reader shared by all the structured-text loaders. Strips
// comments (# to end of line) and blank lines, tracks line numbers for
// error messages.
class TextFile {
public:
    explicit TextFile(const std::string& path) : path_(path)
    {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open file: " + path);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto t = text::trim(line);
            if (t.empty()) continue;
            lines_.emplace_back(no, std::string(t));
        }
    }

    const std::string& path() const { return path_; }
    size_t size() const { return lines_.size(); }
    int line_number(size_t i) const { return lines_[i].first; }
    const std::string& line(size_t i) const { return lines_[i].second; }

    std::string where(size_t i) const { return path_ + ":" + std::to_string(line_number(i)); }

private:
    std::string path_;
    std::vector<std::pair<int, std::string>> lines_;
};

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

// Warning sink; tests may capture it, the CLI prints to stderr.
using WarnFn = void (*)(const std::string&);
inline WarnFn& warn_handler()
{
    static WarnFn fn = +[](const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); };
    return fn;
}
inline void warn(const std::string& msg)
{
    if (warn_handler()) warn_handler()(msg);
}

}  // namespace wqnet

#endif
