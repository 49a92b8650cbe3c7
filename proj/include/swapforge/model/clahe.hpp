#pragma once

#include "swapforge/imaging/image.hpp"

namespace swapforge::model {

struct ClaheParams {
    double clip_limit = 2.0;  // multiple of the mean bin height
    int tiles_x = 8;
    int tiles_y = 8;
    int bins = 256;
};

/// Contrast-limited adaptive histogram equalization. RGB input is
/// equalized on the L* channel of Lab; single-channel input directly.
/// A tile whose histogram occupies a single bin keeps the identity mapping,
/// so constant images are fixed points. Pixels whose lightness is
/// unchanged are copied through bit-exactly.
imaging::ImageBuf clahe(const imaging::ImageBuf& img, const ClaheParams& p = {});

}  // namespace swapforge::model
