#include "packcache/rational.hpp"

#include <sstream>
#include <stdexcept>

namespace packcache {

std::int64_t floor_to_i64(const Rational& r) {
    if (r < 0) {
        throw std::invalid_argument("floor_to_i64: negative rational");
    }
    BigInt q = numerator(r) / denominator(r);
    return q.convert_to<std::int64_t>();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_rational(const std::string& text) {
    std::string s = text;
    auto bad = [&] { throw std::invalid_argument("invalid rational: '" + text + "'"); };
    // trim
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) bad();
    s = s.substr(b, e - b + 1);

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        if (num.empty() || den.empty()) bad();
        try {
            BigInt n(num), d(den);
            if (d == 0) bad();
            return Rational(n, d);
        } catch (const std::runtime_error&) {
            bad();
        }
    }
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        const std::string whole = s.substr(0, dot);
        const std::string frac = s.substr(dot + 1);
        if (whole.empty() && frac.empty()) bad();
        for (char c : whole) if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-') bad();
        for (char c : frac) if (!std::isdigit(static_cast<unsigned char>(c))) bad();
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const bool neg = !whole.empty() && whole[0] == '-';
        BigInt w = whole.empty() || whole == "-" ? BigInt(0) : BigInt(whole);
        BigInt f = frac.empty() ? BigInt(0) : BigInt(frac);
        if (w < 0) w = -w;
        BigInt n = w * scale + f;
        return Rational(neg ? -n : n, scale);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (!std::isdigit(static_cast<unsigned char>(c)) && !(i == 0 && c == '-')) bad();
    }
    try {
        return Rational(BigInt(s));
    } catch (const std::runtime_error&) {
        bad();
    }
    return Rational(0);  // unreachable
}

std::string to_string(const Rational& r) {
    std::ostringstream out;
    out << r;
    return out.str();
}

std::string to_string(const std::vector<Rational>& fractions) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (i) out << ',';
        out << fractions[i];
    }
    out << ']';
    return out.str();
}

}  // namespace packcache
