#include "plot.hpp"

#include <fmt/format.h>

namespace tdeform::cli {

namespace {

std::string gp_string(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "''";  // gnuplot escapes a quote by doubling it
    else out += ch;
  }
  return out + "'";
}

std::string quoted(const std::filesystem::path& p) {
  return gp_string(std::filesystem::absolute(p).lexically_normal().string());
}

std::string png_for(const std::filesystem::path& script) {
  auto png = script;
  png.replace_extension(".png");
  return quoted(png);
}

}  // namespace

std::string trajectory_plot_script(const std::filesystem::path& data, const std::filesystem::path& script,
                                   const std::string& title) {
  return fmt::format(R"(# gnuplot script written by tdeform; run: gnuplot {script}
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set terminal pngcairo size 1400,650
set output {png}
set multiplot layout 1,2 title {title}

set xlabel 'x'
set ylabel 'z'
plot {data} using 2:4 with lines lw 0.5 notitle

set xlabel 'x'
set ylabel 'y'
set zlabel 'z'
set view 70,30
splot {data} using 2:3:4 with lines lw 0.5 notitle

unset multiplot
)",
                     fmt::arg("script", script.filename().string()), fmt::arg("png", png_for(script)),
                     fmt::arg("title", gp_string(title)),
                     fmt::arg("data", quoted(data)));
}

std::string sweep_plot_script(const std::filesystem::path& data, const std::filesystem::path& script,
                              const std::string& title) {
  return fmt::format(R"(# gnuplot script written by tdeform; run: gnuplot {script}
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set terminal pngcairo size 900,500
set output {png}
set title {title}
set xlabel 'g'
set ylabel 'largest Lyapunov exponent'
set grid
set xzeroaxis lt -1
plot {data} using 1:2 with linespoints pt 7 ps 0.5 notitle
)",
                     fmt::arg("script", script.filename().string()), fmt::arg("png", png_for(script)),
                     fmt::arg("title", gp_string(title)), fmt::arg("data", quoted(data)));
}

}  // namespace tdeform::cli
