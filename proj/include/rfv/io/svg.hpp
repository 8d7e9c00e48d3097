#pragma once

#include <string>
#include <vector>

namespace rfv {

std::string xml_escape(const std::string& text);

// Minimal line-plot renderer. Every line or step series becomes exactly one
// <polyline>; scatter series become <circle> marks. Axes get ticks and the
// legend lists every series.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void set_log_x(bool log_x) { log_x_ = log_x; }

    void add_line(const std::string& label, const std::vector<double>& x,
                  const std::vector<double>& y);
    void add_scatter(const std::string& label, const std::vector<double>& x,
                     const std::vector<double>& y);
    // Histogram outline: edges has one more entry than heights.
    void add_step(const std::string& label, const std::vector<double>& edges,
                  const std::vector<double>& heights);

    std::string str() const;

  private:
    enum class Kind { line, scatter, step };
    struct Series {
        std::string label;
        Kind kind;
        std::vector<double> x, y;  // step series store the expanded outline
    };

    void push(const std::string& label, Kind kind, std::vector<double> x,
              std::vector<double> y);

    std::string title_, x_label_, y_label_;
    bool log_x_ = false;
    std::vector<Series> series_;
};

}  // namespace rfv
