#include "swapforge/alignment/face_template.hpp"

#include <cmath>

namespace swapforge::alignment {

namespace {

// Generated from a parametric head model: jaw on an elliptic arc, eyes and
// lips as ellipses, inner features on the depth surface z = 0.55x^2 + 0.12y^2
// with the nose ridge protruding toward the camera.
constexpr Template3d kFaceTemplate3d = {{
    {-0.5000, -0.0500, 0.4500}, {-0.4904, 0.0671, 0.4348},
    {-0.4619, 0.1796, 0.3914}, {-0.4157, 0.2833, 0.3265},
    {-0.3536, 0.3743, 0.2500}, {-0.2778, 0.4489, 0.1735},
    {-0.1913, 0.5043, 0.1086}, {-0.0975, 0.5385, 0.0652},
    {0.0000, 0.5500, 0.0500}, {0.0975, 0.5385, 0.0652},
    {0.1913, 0.5043, 0.1086}, {0.2778, 0.4489, 0.1735},
    {0.3536, 0.3743, 0.2500}, {0.4157, 0.2833, 0.3265},
    {0.4619, 0.1796, 0.3914}, {0.4904, 0.0671, 0.4348},
    {0.5000, -0.0500, 0.4500}, {-0.4000, -0.3205, 0.0603},
    {-0.3200, -0.3298, 0.0294}, {-0.2400, -0.3246, 0.0043},
    {-0.1600, -0.3061, -0.0147}, {-0.0800, -0.2800, -0.0271},
    {0.0800, -0.2800, -0.0271}, {0.1600, -0.3061, -0.0147},
    {0.2400, -0.3246, 0.0043}, {0.3200, -0.3298, 0.0294},
    {0.4000, -0.3205, 0.0603}, {0.0000, -0.2000, -0.0400},
    {0.0000, -0.1100, -0.1000}, {0.0000, -0.0200, -0.1600},
    {0.0000, 0.0700, -0.2200}, {-0.1000, 0.1000, -0.1000},
    {-0.0500, 0.1100, -0.1300}, {0.0000, 0.1200, -0.1600},
    {0.0500, 0.1100, -0.1300}, {0.1000, 0.1000, -0.1000},
    {-0.2750, -0.1400, 0.0239}, {-0.2300, -0.1680, 0.0125},
    {-0.1700, -0.1680, -0.0007}, {-0.1250, -0.1400, -0.0091},
    {-0.1700, -0.1120, -0.0026}, {-0.2300, -0.1120, 0.0106},
    {0.1250, -0.1400, -0.0091}, {0.1700, -0.1680, -0.0007},
    {0.2300, -0.1680, 0.0125}, {0.2750, -0.1400, 0.0239},
    {0.2300, -0.1120, 0.0106}, {0.1700, -0.1120, -0.0026},
    {-0.1700, 0.3000, -0.0333}, {-0.1100, 0.2550, -0.0455},
    {-0.0400, 0.2400, -0.0522}, {0.0000, 0.2500, -0.0525},
    {0.0400, 0.2400, -0.0522}, {0.1100, 0.2550, -0.0455},
    {0.1700, 0.3000, -0.0333}, {0.1100, 0.3600, -0.0378},
    {0.0500, 0.3750, -0.0417}, {0.0000, 0.3780, -0.0429},
    {-0.0500, 0.3750, -0.0417}, {-0.1100, 0.3600, -0.0378},
    {-0.1200, 0.3000, -0.0363}, {-0.0500, 0.2820, -0.0441},
    {0.0000, 0.2850, -0.0453}, {0.0500, 0.2820, -0.0441},
    {0.1200, 0.3000, -0.0363}, {0.0500, 0.3200, -0.0413},
    {0.0000, 0.3220, -0.0426}, {-0.0500, 0.3200, -0.0413},
}};

}  // namespace

const Template3d& face_template_3d() { return kFaceTemplate3d; }

imaging::Point2 right_eye_center(const imaging::Landmarks68& lm) {
    imaging::Point2 c;
    for (int i = 36; i < 42; ++i) {
        c.x += lm[i].x / 6.0;
        c.y += lm[i].y / 6.0;
    }
    return c;
}

imaging::Point2 left_eye_center(const imaging::Landmarks68& lm) {
    imaging::Point2 c;
    for (int i = 42; i < 48; ++i) {
        c.x += lm[i].x / 6.0;
        c.y += lm[i].y / 6.0;
    }
    return c;
}

const imaging::Landmarks68& face_template_2d() {
    static const imaging::Landmarks68 tmpl = [] {
        imaging::Landmarks68 raw;
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = {kFaceTemplate3d[i].x, kFaceTemplate3d[i].y};
        const auto re = right_eye_center(raw);
        const auto le = left_eye_center(raw);
        const double iod = std::hypot(le.x - re.x, le.y - re.y);
        const double scale = kInterOcularFraction * kAlignedSize / iod;
        double cx = 0.0, cy = 0.0;
        for (const auto& p : raw) {
            cx += p.x / raw.size();
            cy += p.y / raw.size();
        }
        imaging::Landmarks68 out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = {(raw[i].x - cx) * scale + kAlignedSize / 2.0, (raw[i].y - cy) * scale + kAlignedSize / 2.0};
        }
        return out;
    }();
    return tmpl;
}

}  // namespace swapforge::alignment
