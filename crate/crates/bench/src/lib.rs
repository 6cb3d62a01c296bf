// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Benchmark-only crate; see `benches/`.
