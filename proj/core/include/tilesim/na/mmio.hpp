/*
 * Copyright 2026 The tilesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file mmio.hpp
 * @brief Network adapter register map, as offsets from 0xFFFF_0000.
 *
 * docs/mmio.md is the normative description; keep both in sync.
 */
#pragma once

#include <cstdint>

namespace tilesim::na::reg {

inline constexpr std::uint32_t kSendDestTile = 0x00;
inline constexpr std::uint32_t kSendDestPort = 0x04;
inline constexpr std::uint32_t kSendSrcPort = 0x08;
inline constexpr std::uint32_t kSendLen = 0x0C;
inline constexpr std::uint32_t kSendAddr = 0x10;
inline constexpr std::uint32_t kSendGoStatus = 0x14;  // write: GO, read: STATUS
inline constexpr std::uint32_t kRecvStatus = 0x20;    // + 4 * port
inline constexpr std::uint32_t kRecvWord = 0x60;      // + 4 * port
inline constexpr std::uint32_t kDmaLocalAddr = 0xA0;
inline constexpr std::uint32_t kDmaRemoteTile = 0xA4;
inline constexpr std::uint32_t kDmaRemoteAddr = 0xA8;
inline constexpr std::uint32_t kDmaLen = 0xAC;
inline constexpr std::uint32_t kDmaDir = 0xB0;        // 0 = ReadRemote, 1 = WriteRemote
inline constexpr std::uint32_t kDmaStart = 0xB4;      // write: start, read: last txn id
inline constexpr std::uint32_t kDmaStatus = 0xB8;     // write 1s to clear done bits
inline constexpr std::uint32_t kPgasPartition = 0xC0;
inline constexpr std::uint32_t kTileId = 0xF0;
inline constexpr std::uint32_t kNumTiles = 0xF4;

// STATUS bits (kSendGoStatus read)
inline constexpr std::uint32_t kStatusSendBusy = 1u << 0;
inline constexpr std::uint32_t kStatusErrLen = 1u << 1;
inline constexpr std::uint32_t kStatusErrBusy = 1u << 2;
inline constexpr std::uint32_t kStatusErrDest = 1u << 3;
inline constexpr std::uint32_t kStatusRecvOverflow = 1u << 4;   // sticky
inline constexpr std::uint32_t kStatusUnknownPort = 1u << 5;    // sticky

// RECV_STATUS(p) bits
inline constexpr std::uint32_t kRecvCountMask = 0xFFFF;
inline constexpr std::uint32_t kRecvOverflow = 1u << 31;

// DMA_STATUS bits
inline constexpr std::uint32_t kDmaDoneShift = 0;
inline constexpr std::uint32_t kDmaBusyShift = 8;
inline constexpr std::uint32_t kDmaErrNoSlot = 1u << 16;
inline constexpr std::uint32_t kDmaErrRange = 1u << 17;
inline constexpr std::uint32_t kDmaErrRemote = 1u << 18;  // sticky

inline constexpr std::uint32_t kDmaStartFailed = 0xFFFF'FFFFu;

}  // namespace tilesim::na::reg
