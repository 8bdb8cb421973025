#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace spinbath::csv {

// Floats are written with 17 significant digits so CSV round trips are
// bit-stable; identical runs therefore produce byte-identical files.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class Writer {
  public:
    explicit Writer(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("csv: cannot open " + path);
    }

    void header(std::initializer_list<const char*> names) {
        bool first = true;
        for (const char* n : names) {
            if (!first) out_ << ',';
            out_ << n;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::span<const double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_double(v);
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        row(std::span<const double>(values.begin(), values.size()));
    }

  private:
    std::ofstream out_;
};

} // namespace spinbath::csv
