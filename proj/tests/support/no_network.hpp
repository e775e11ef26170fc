#pragma once
// Linking no_network.cpp replaces connect(): every attempt is counted and
// refused, so a test can show that nothing reached for the network.

namespace oracle {

unsigned network_attempts();

}  // namespace oracle
