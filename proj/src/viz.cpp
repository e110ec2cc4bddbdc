#include "sefr/viz.hpp"

#include <algorithm>
#include <cmath>

#include "sefr/error.hpp"

namespace sefr {

std::uint8_t weight_to_gray(double w) noexcept
{
    if (std::isnan(w))
        return 128;
    const double g = std::round(127.5 * (std::clamp(w, -1.0, 1.0) + 1.0));
    return static_cast<std::uint8_t>(g);
}

std::string encode_pgm(std::size_t width, std::size_t height, std::span<const std::uint8_t> pixels)
{
    if (width == 0 || height == 0 || width * height != pixels.size())
        throw Error(ErrorCode::ShapeMismatch, std::to_string(width) + "x" + std::to_string(height) +
                                                  " image cannot hold " + std::to_string(pixels.size()) + " pixels");
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(pixels.begin(), pixels.end());
    return out;
}

std::vector<WeightImage> weight_images(const Model& model, std::size_t width, std::size_t height)
{
    const auto features = feature_count(model);
    if (width == 0 || height == 0 || width * height != features)
        throw Error(ErrorCode::ShapeMismatch, std::to_string(width) + "x" + std::to_string(height) +
                                                  " does not match " + std::to_string(features) + " features");
    auto render = [&](const BinaryModel& m) {
        std::vector<std::uint8_t> pixels(m.weights.size());
        std::transform(m.weights.begin(), m.weights.end(), pixels.begin(), weight_to_gray);
        return encode_pgm(width, height, pixels);
    };
    std::vector<WeightImage> out;
    if (const auto* b = std::get_if<BinaryModel>(&model)) {
        out.push_back({b->positive_label, render(*b)});
    } else {
        const auto& mc = std::get<MulticlassModel>(model);
        for (std::size_t c = 0; c < mc.classes.size(); ++c)
            out.push_back({mc.classes[c], render(mc.models[c])});
    }
    return out;
}

} // namespace sefr
