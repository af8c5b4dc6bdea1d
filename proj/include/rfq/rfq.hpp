#pragma once

#include "index_file.hpp"
#include "listing.hpp"
#include "majority.hpp"
#include "minority.hpp"
#include "range_index.hpp"
#include "swar_kernel.hpp"
#include "wavelet_sequence.hpp"
