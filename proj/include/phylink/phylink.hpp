#pragma once

// Umbrella header: chip identification, chip-derived key pairs, signed
// transfer chains, merkle-bundled proof-of-work ledger, the physical-logical
// link layer, the device-network simulator, and the file formats.

#include "phylink/bigint.hpp"
#include "phylink/bitstring.hpp"
#include "phylink/blockchain.hpp"
#include "phylink/chip.hpp"
#include "phylink/hex.hpp"
#include "phylink/io.hpp"
#include "phylink/keys.hpp"
#include "phylink/link.hpp"
#include "phylink/merkle.hpp"
#include "phylink/netsim.hpp"
#include "phylink/prime.hpp"
#include "phylink/rng.hpp"
#include "phylink/sha256.hpp"
#include "phylink/transaction.hpp"
