#include "swapforge/curation/quality.hpp"

#include <algorithm>

#include "swapforge/errors.hpp"
#include "swapforge/imaging/color.hpp"
#include "swapforge/imaging/filters.hpp"

namespace swapforge::curation {

double blur_score(const imaging::ImageBuf& img) {
    if (img.empty()) throw InvalidArgument("blur_score: empty image");
    imaging::ImageBuf gray = imaging::rgb_to_gray(img);
    for (float& v : gray.data()) v *= 255.0f;
    const imaging::ImageBuf lap = imaging::laplacian(gray);
    const auto d = lap.data();
    double mean = 0.0;
    for (float v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (float v : d) var += (v - mean) * (v - mean);
    return var / static_cast<double>(d.size());
}

double face_size(const imaging::Landmarks68& lm) {
    auto [xmin, xmax] = std::minmax_element(lm.begin(), lm.end(), [](auto a, auto b) { return a.x < b.x; });
    auto [ymin, ymax] = std::minmax_element(lm.begin(), lm.end(), [](auto a, auto b) { return a.y < b.y; });
    return std::max(xmax->x - xmin->x, ymax->y - ymin->y);
}

}  // namespace swapforge::curation
