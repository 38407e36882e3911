#include "icefloe/render.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "icefloe/errors.hpp"
#include "icefloe/traj_io.hpp"

namespace icefloe::render {

void Image::set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
    if (x < 0 || x >= width || y < 0 || y >= height) return;
    const std::size_t at = (std::size_t(y) * width + x) * 3;
    rgb[at] = r;
    rgb[at + 1] = g;
    rgb[at + 2] = b;
}

std::string to_ppm(const Image& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
    return out;
}

namespace {

struct Rgb {
    unsigned char r, g, b;
};

Rgb hsv(double h, double s, double v) {
    h = std::fmod(h, 360.0);
    const double c = v * s;
    const double x = c * (1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0));
    const double m = v - c;
    double r = 0, g = 0, b = 0;
    if (h < 60) { r = c; g = x; }
    else if (h < 120) { r = x; g = c; }
    else if (h < 180) { g = c; b = x; }
    else if (h < 240) { g = x; b = c; }
    else if (h < 300) { r = x; b = c; }
    else { r = c; b = x; }
    auto u8 = [&](double q) { return (unsigned char)std::lround(255.0 * (q + m)); };
    return {u8(r), u8(g), u8(b)};
}

// golden-angle hue walk keeps neighbouring floes distinguishable
Rgb floe_colour(int i) { return hsv(std::fmod(20.0 + 137.508 * i, 360.0), 0.65, 0.85); }

// 3x5 glyphs for the annotation "t=<index>"
constexpr const char* kGlyphs[12] = {
    "111101101101111",  // 0
    "010110010010111",  // 1
    "111001111100111",  // 2
    "111001111001111",  // 3
    "101101111001001",  // 4
    "111100111001111",  // 5
    "111100111101111",  // 6
    "111001001001001",  // 7
    "111101111101111",  // 8
    "111101111001111",  // 9
    "010111010010011",  // t
    "000111000111000",  // =
};

void draw_glyph(Image& img, int index, int x0, int y0, int scale) {
    const char* bits = kGlyphs[index];
    for (int gy = 0; gy < 5; ++gy)
        for (int gx = 0; gx < 3; ++gx)
            if (bits[gy * 3 + gx] == '1')
                for (int sy = 0; sy < scale; ++sy)
                    for (int sx = 0; sx < scale; ++sx)
                        img.set(x0 + gx * scale + sx, y0 + gy * scale + sy, 30, 30, 30);
}

void draw_text(Image& img, const std::string& text, int x0, int y0, int scale) {
    int x = x0;
    for (char ch : text) {
        int idx = -1;
        if (ch >= '0' && ch <= '9') idx = ch - '0';
        else if (ch == 't') idx = 10;
        else if (ch == '=') idx = 11;
        if (idx >= 0) draw_glyph(img, idx, x, y0, scale);
        x += 4 * scale;
    }
}

}  // namespace

Image render_state(const SimState& state, const FloeSystem& system, long time_index,
                   const RenderOptions& opt) {
    Image img(opt.width, opt.height);
    double r_max = 0.0;
    for (double r : system.radius) r_max = std::max(r_max, r);
    const double world_left = system.domain_left - 2.0 * r_max;
    const double world_right = system.domain_right + 2.0 * r_max;
    const double scale = double(opt.width) / (world_right - world_left);
    const int cy = opt.height / 2;
    auto px = [&](double wx) { return int(std::lround((wx - world_left) * scale)); };

    // walls
    for (double wall : {system.domain_left, system.domain_right}) {
        const int wx = px(wall);
        for (int y = 0; y < opt.height; ++y)
            for (int dx = -1; dx <= 1; ++dx) img.set(wx + dx, y, 40, 40, 40);
    }

    for (int i = 0; i < system.n_floes; ++i) {
        const Rgb c = floe_colour(i);
        const double rpx = system.radius[std::size_t(i)] * scale;
        const int cx = px(state.x[std::size_t(i)]);
        const int ri = int(std::ceil(rpx));
        for (int dy = -ri; dy <= ri; ++dy)
            for (int dx = -ri; dx <= ri; ++dx)
                if (double(dx) * dx + double(dy) * dy <= rpx * rpx)
                    img.set(cx + dx, cy + dy, c.r, c.g, c.b);
    }

    draw_text(img, "t=" + std::to_string(time_index), 4, 4, 2);
    return img;
}

std::vector<std::string> render_frames(const Trajectory& traj, long from, long to, long stride,
                                       const std::string& out_dir, const RenderOptions& opt) {
    if (from < 0 || to >= traj.n_states() || from > to)
        throw RangeOutOfBounds("render_frames: step range outside the trajectory");
    if (stride < 1) throw InvalidConfig("render_frames: stride must be >= 1");
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (long j = from; j <= to; j += stride) {
        const SimState& s = traj.states[std::size_t(j)];
        const Image img = render_state(s, traj.system, s.time_index, opt);
        std::string name = std::to_string(s.time_index);
        name.insert(0, name.size() < 8 ? 8 - name.size() : 0, '0');
        const std::string path = out_dir + "/frame_" + name + ".ppm";
        io::atomic_write_text(path, to_ppm(img));
        written.push_back(path);
    }
    return written;
}

Image render_pcc_chart(const Vec& pcc_per_floe, const RenderOptions& opt) {
    if (pcc_per_floe.empty()) throw EmptyInput("render_pcc_chart: no values");
    Image img(opt.width, std::max(opt.height, 100));
    const int n = int(pcc_per_floe.size());
    const int gap = 2;
    const int bar_w = std::max(1, (img.width - gap * (n + 1)) / n);
    const int base = img.height - 10;  // y of pcc == -1
    const int top = 5;                 // y of pcc == +1
    const int zero = (base + top) / 2;
    for (int x = 0; x < img.width; ++x) img.set(x, zero, 120, 120, 120);
    for (int i = 0; i < n; ++i) {
        const double p = std::clamp(pcc_per_floe[std::size_t(i)], -1.0, 1.0);
        const int y = int(std::lround(zero - p * (zero - top)));
        const Rgb c = floe_colour(i);
        const int x0 = gap + i * (bar_w + gap);
        const int y_lo = std::min(zero, y), y_hi = std::max(zero, y);
        for (int x = x0; x < x0 + bar_w; ++x)
            for (int yy = y_lo; yy <= y_hi; ++yy) img.set(x, yy, c.r, c.g, c.b);
    }
    return img;
}

}  // namespace icefloe::render
