#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tframe/error.hpp"
#include "tframe/image.hpp"
#include "tframe/tiling.hpp"

namespace tframe {

// Frame layout: magic "TFRM", version byte, variant byte, 4-byte big-endian
// payload length, payload.
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 10;
inline constexpr char kMagic[4] = {'T', 'F', 'R', 'M'};

enum class MsgType : std::uint8_t {
  assign = 1,
  result = 2,
  shutdown = 3,
  error = 4,
};

struct AssignMsg {
  std::uint32_t tile_id = 0;
  Rect halo;
  Rect core;
  std::string algo;
  std::string params;
  ImageBuffer pixels;  // halo-sized
  PixelMask mask;      // halo-sized

  bool operator==(const AssignMsg&) const = default;
};

struct ResultMsg {
  std::uint32_t tile_id = 0;
  ImageBuffer pixels;  // halo-sized

  bool operator==(const ResultMsg&) const = default;
};

struct ShutdownMsg {
  bool operator==(const ShutdownMsg&) const = default;
};

struct ErrorMsg {
  std::uint32_t tile_id = 0;
  std::string text;

  bool operator==(const ErrorMsg&) const = default;
};

using WireMessage = std::variant<AssignMsg, ResultMsg, ShutdownMsg, ErrorMsg>;

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_rect(std::vector<std::uint8_t>& out, const Rect& r) {
  put_u32(out, static_cast<std::uint32_t>(r.x));
  put_u32(out, static_cast<std::uint32_t>(r.y));
  put_u32(out, static_cast<std::uint32_t>(r.w));
  put_u32(out, static_cast<std::uint32_t>(r.h));
}

inline void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
  if (s.size() > 0xFFFF) throw ProtocolError("encode: string field exceeds 64 KiB");
  put_u16(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

// Mask bits packed row-major, MSB first, rows padded to byte boundary.
inline void put_mask(std::vector<std::uint8_t>& out, const PixelMask& mask) {
  for (int y = 0; y < mask.height(); ++y) {
    std::uint8_t byte = 0;
    int nbits = 0;
    for (int x = 0; x < mask.width(); ++x) {
      byte = static_cast<std::uint8_t>((byte << 1) | (mask.known(x, y) ? 1 : 0));
      if (++nbits == 8) {
        out.push_back(byte);
        byte = 0;
        nbits = 0;
      }
    }
    if (nbits > 0) out.push_back(static_cast<std::uint8_t>(byte << (8 - nbits)));
  }
}

class PayloadReader {
 public:
  explicit PayloadReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
    pos_ += 4;
    return v;
  }

  Rect rect() {
    Rect r;
    r.x = checked_dim(u32(), 0, "rect offset");
    r.y = checked_dim(u32(), 0, "rect offset");
    r.w = checked_dim(u32(), 1, "rect extent");
    r.h = checked_dim(u32(), 1, "rect extent");
    return r;
  }

  std::string string() {
    const std::size_t n = u16();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  ImageBuffer pixels(int w, int h) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    need(n);
    std::vector<std::uint8_t> samples(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return ImageBuffer(w, h, std::move(samples));
  }

  PixelMask mask_bits(int w, int h) {
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    need(row_bytes * h);
    PixelMask mask(w, h);
    for (int y = 0; y < h; ++y) {
      const std::uint8_t* row = data_.data() + pos_ + static_cast<std::size_t>(y) * row_bytes;
      for (int x = 0; x < w; ++x)
        mask.set_known(x, y, (row[x / 8] >> (7 - x % 8)) & 1);
    }
    pos_ += row_bytes * h;
    return mask;
  }

  void finish() const {
    if (pos_ != data_.size())
      throw ProtocolError("decode: " + std::to_string(data_.size() - pos_) +
                          " trailing payload bytes");
  }

 private:
  static int checked_dim(std::uint32_t v, std::uint32_t lo, const char* what) {
    if (v < lo || v > 0x7FFFFFFF)
      throw ProtocolError(std::string("decode: implausible ") + what);
    return static_cast<int>(v);
  }
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ProtocolError("decode: payload truncated");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode(const WireMessage& msg) {
  std::vector<std::uint8_t> payload;
  MsgType type;
  if (const auto* a = std::get_if<AssignMsg>(&msg)) {
    type = MsgType::assign;
    if (a->pixels.width() != a->halo.w || a->pixels.height() != a->halo.h ||
        a->mask.width() != a->halo.w || a->mask.height() != a->halo.h)
      throw ProtocolError("encode: ASSIGN payload dimensions do not match halo");
    detail::put_u32(payload, a->tile_id);
    detail::put_rect(payload, a->halo);
    detail::put_rect(payload, a->core);
    detail::put_string(payload, a->algo);
    detail::put_string(payload, a->params);
    payload.insert(payload.end(), a->pixels.samples().begin(), a->pixels.samples().end());
    detail::put_mask(payload, a->mask);
  } else if (const auto* r = std::get_if<ResultMsg>(&msg)) {
    type = MsgType::result;
    detail::put_u32(payload, r->tile_id);
    detail::put_u32(payload, static_cast<std::uint32_t>(r->pixels.width()));
    detail::put_u32(payload, static_cast<std::uint32_t>(r->pixels.height()));
    payload.insert(payload.end(), r->pixels.samples().begin(), r->pixels.samples().end());
  } else if (std::holds_alternative<ShutdownMsg>(msg)) {
    type = MsgType::shutdown;
  } else {
    const auto& e = std::get<ErrorMsg>(msg);
    type = MsgType::error;
    detail::put_u32(payload, e.tile_id);
    detail::put_string(payload, e.text);
  }

  std::vector<std::uint8_t> frame;
  frame.reserve(kFrameHeaderSize + payload.size());
  frame.insert(frame.end(), std::begin(kMagic), std::end(kMagic));
  frame.push_back(kProtocolVersion);
  frame.push_back(static_cast<std::uint8_t>(type));
  detail::put_u32(frame, static_cast<std::uint32_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

inline WireMessage decode(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameHeaderSize) throw ProtocolError("decode: frame shorter than header");
  if (std::memcmp(frame.data(), kMagic, 4) != 0) throw ProtocolError("decode: bad magic");
  if (frame[4] != kProtocolVersion)
    throw ProtocolError("decode: unsupported version " + std::to_string(frame[4]));
  const std::uint8_t variant = frame[5];
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = len << 8 | frame[6 + i];
  if (frame.size() - kFrameHeaderSize < len) throw ProtocolError("decode: frame truncated");
  if (frame.size() - kFrameHeaderSize > len)
    throw ProtocolError("decode: frame length overrun (trailing bytes)");
  detail::PayloadReader r(frame.subspan(kFrameHeaderSize, len));

  switch (static_cast<MsgType>(variant)) {
    case MsgType::assign: {
      AssignMsg m;
      m.tile_id = r.u32();
      m.halo = r.rect();
      m.core = r.rect();
      m.algo = r.string();
      m.params = r.string();
      m.pixels = r.pixels(m.halo.w, m.halo.h);
      m.mask = r.mask_bits(m.halo.w, m.halo.h);
      r.finish();
      return m;
    }
    case MsgType::result: {
      ResultMsg m;
      m.tile_id = r.u32();
      const std::uint32_t w = r.u32();
      const std::uint32_t h = r.u32();
      if (w < 1 || h < 1 || w > 0x7FFFFFFF || h > 0x7FFFFFFF ||
          static_cast<std::uint64_t>(w) * h > (1u << 31))
        throw ProtocolError("decode: implausible RESULT dimensions");
      m.pixels = r.pixels(static_cast<int>(w), static_cast<int>(h));
      r.finish();
      return m;
    }
    case MsgType::shutdown: {
      r.finish();
      return ShutdownMsg{};
    }
    case MsgType::error: {
      ErrorMsg m;
      m.tile_id = r.u32();
      m.text = r.string();
      r.finish();
      return m;
    }
    default:
      throw ProtocolError("decode: unknown variant " + std::to_string(variant));
  }
}

}  // namespace tframe
