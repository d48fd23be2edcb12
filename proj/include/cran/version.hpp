// SPDX-License-Identifier: Apache-2.0
#pragma once

#define CRAN_SCHED_VERSION "0.1.0"
