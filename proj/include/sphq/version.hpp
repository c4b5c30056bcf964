#pragma once

#define SPHQ_VERSION_MAJOR 0
#define SPHQ_VERSION_MINOR 1
#define SPHQ_VERSION_PATCH 0
#define SPHQ_VERSION "0.1.0"
