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
 * @file registers.hpp
 * @brief Debug module register numbers (16-bit registers, REG_READ/REG_WRITE).
 */
#pragma once

#include <cstdint>

namespace tilesim::debug::reg {

// All modules
inline constexpr std::uint16_t kType = 0x00;
inline constexpr std::uint16_t kVersion = 0x01;
inline constexpr std::uint16_t kAttach = 0x02;  // EXTIF: module count
inline constexpr std::uint16_t kEnable = 0x03;
inline constexpr std::uint16_t kTriggerInput = 0x04;
inline constexpr std::uint16_t kWindow = 0x05;  // NOC_STAT only

// Trigger slot
inline constexpr std::uint16_t kTrigCond = 0x10;
inline constexpr std::uint16_t kTrigArgHi = 0x11;
inline constexpr std::uint16_t kTrigArgLo = 0x12;
inline constexpr std::uint16_t kTrigWindow = 0x13;
inline constexpr std::uint16_t kTrigAction = 0x14;
inline constexpr std::uint16_t kTrigScope = 0x15;
inline constexpr std::uint16_t kTrigArm = 0x16;
inline constexpr std::uint16_t kTrigError = 0x17;  // 1: type mismatch, 2: bad argument

// External interface
inline constexpr std::uint16_t kModuleCount = 0x02;
inline constexpr std::uint16_t kRun = 0x20;

inline constexpr std::uint16_t kTrigErrTypeMismatch = 1;
inline constexpr std::uint16_t kTrigErrBadArgument = 2;

}  // namespace tilesim::debug::reg
