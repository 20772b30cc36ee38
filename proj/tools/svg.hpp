#ifndef OAMSIM_SVG_HPP
#define OAMSIM_SVG_HPP

#include <string>
#include <vector>

namespace oamsim
{
struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    // fixed y range when lo < hi
    double y_lo = 0.0;
    double y_hi = 0.0;
};

std::string render(const LinePlot &plot);

// values[row][col]; rows run along x (time), columns along y (site).
struct Heatmap
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::vector<double>> values;
};

std::string render(const Heatmap &map);

} // namespace oamsim

#endif
