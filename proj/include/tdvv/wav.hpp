#pragma once

// Minimal RIFF/WAVE reader and writer. Reads PCM16, PCM24 and float32,
// including the WAVE_FORMAT_EXTENSIBLE wrapping of those; writes float32.
// Samples are exchanged as doubles in [-1, 1] per channel.

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdvv {

struct WavData {
    int sample_rate = 0;
    std::vector<std::vector<double>> channels;

    std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace detail

inline WavData wav_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("wav: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("wav: not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t len = detail::read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + len > bytes.size()) throw std::runtime_error("wav: truncated chunk in " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) throw std::runtime_error("wav: fmt chunk too short in " + path);
            format = detail::read_u16(bytes.data() + body);
            channels = detail::read_u16(bytes.data() + body + 2);
            rate = detail::read_u32(bytes.data() + body + 4);
            bits = detail::read_u16(bytes.data() + body + 14);
            if (format == 0xfffe) {  // extensible: true format in the GUID head
                if (len < 40) throw std::runtime_error("wav: extensible fmt too short in " + path);
                format = detail::read_u16(bytes.data() + body + 24);
            }
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = len;
        }
        pos = body + len + (len & 1);  // chunks are word-aligned
    }
    if (channels == 0 || rate == 0) throw std::runtime_error("wav: missing fmt chunk in " + path);
    if (data == nullptr) throw std::runtime_error("wav: missing data chunk in " + path);

    const std::size_t bytes_per = bits / 8u;
    if (bytes_per == 0) throw std::runtime_error("wav: zero bit depth in " + path);
    const std::size_t frame_bytes = bytes_per * channels;
    const std::size_t n = data_len / frame_bytes;

    WavData out;
    out.sample_rate = static_cast<int>(rate);
    out.channels.assign(channels, std::vector<double>(n));

    if (format == 1 && bits == 16) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                const unsigned char* p = data + i * frame_bytes + ch * 2;
                const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
                out.channels[ch][i] = v / 32768.0;
            }
    } else if (format == 1 && bits == 24) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                const unsigned char* p = data + i * frame_bytes + ch * 3;
                std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
                if (v & 0x800000) v |= ~0xffffff;  // sign-extend
                out.channels[ch][i] = v / 8388608.0;
            }
    } else if (format == 3 && bits == 32) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                float f;
                std::memcpy(&f, data + i * frame_bytes + ch * 4, 4);
                out.channels[ch][i] = f;
            }
    } else {
        throw std::runtime_error("wav: unsupported format (want PCM16, PCM24 or float32): " +
                                 path);
    }
    return out;
}

inline void wav_write_float32(const std::string& path, const WavData& wav) {
    if (wav.channels.empty()) throw std::invalid_argument("wav: no channels to write");
    const std::size_t n = wav.channels[0].size();
    for (const auto& ch : wav.channels)
        if (ch.size() != n) throw std::invalid_argument("wav: channel lengths differ");

    const auto channels = static_cast<std::uint16_t>(wav.channels.size());
    const std::uint32_t data_len = static_cast<std::uint32_t>(n * channels * 4);

    std::vector<unsigned char> out;
    out.reserve(58 + data_len);
    const char* head = "RIFF";
    out.insert(out.end(), head, head + 4);
    detail::put_u32(out, 4 + 26 + 12 + 8 + data_len);  // WAVE + fmt + fact + data header
    const char* wave = "WAVE";
    out.insert(out.end(), wave, wave + 4);

    const char* fmt = "fmt ";
    out.insert(out.end(), fmt, fmt + 4);
    detail::put_u32(out, 18);
    detail::put_u16(out, 3);  // IEEE float
    detail::put_u16(out, channels);
    detail::put_u32(out, static_cast<std::uint32_t>(wav.sample_rate));
    detail::put_u32(out, static_cast<std::uint32_t>(wav.sample_rate) * channels * 4);
    detail::put_u16(out, static_cast<std::uint16_t>(channels * 4));
    detail::put_u16(out, 32);
    detail::put_u16(out, 0);  // no format extension

    const char* fact = "fact";
    out.insert(out.end(), fact, fact + 4);  // required for non-PCM formats
    detail::put_u32(out, 4);
    detail::put_u32(out, static_cast<std::uint32_t>(n));

    const char* dat = "data";
    out.insert(out.end(), dat, dat + 4);
    detail::put_u32(out, data_len);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t ch = 0; ch < channels; ++ch) {
            const auto f = static_cast<float>(wav.channels[ch][i]);
            unsigned char b[4];
            std::memcpy(b, &f, 4);
            out.insert(out.end(), b, b + 4);
        }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("wav: cannot write " + path);
    os.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
}

}  // namespace tdvv
