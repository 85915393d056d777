#include <cstdlib>
#include <string_view>

#include "sea/kernels.hpp"

namespace sea::kernels {
namespace {

const KernelTable& select() {
  const char* env = std::getenv("SEA_DYN_KERNELS");
  const std::string_view request = env ? env : "auto";
  if (request == "scalar") return scalar_table();
  if (const KernelTable* wide = avx2_table()) return *wide;
  return scalar_table();
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> tables{&scalar_table()};
  if (const KernelTable* wide = avx2_table()) tables.push_back(wide);
  return tables;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace sea::kernels
