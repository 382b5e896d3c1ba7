#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "aespec/cli.hpp"
#include "aespec/eigen.hpp"
#include "aespec/rmt.hpp"

#ifndef AESPEC_DATA_DIR
#define AESPEC_DATA_DIR "data/mnist"
#endif

namespace aespec::cli {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ae::DomainError*>(&e) ||
      dynamic_cast<const rmt::DomainError*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const data::MissingDataError*>(&e) || dynamic_cast<const data::FormatError*>(&e) ||
      dynamic_cast<const ae::FormatError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitData;
  }
  if (dynamic_cast<const SuiteFailure*>(&e) || dynamic_cast<const linalg::ConvergenceError*>(&e) ||
      dynamic_cast<const ae::NumericalError*>(&e)) {
    return kExitNumerical;
  }
  return kExitNumerical;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::RmtVerify:
      return "rmt-verify";
    case Command::Train:
      return "train";
    case Command::Analyze:
      return "analyze";
    case Command::Predict:
      return "predict";
    case Command::Report:
      return "report";
  }
  return "unknown";
}

json RunManifest::to_json() const {
  return json{{"command", command_name(command)},
              {"seeds", seeds},
              {"dataset", dataset},
              {"output_dir", output_dir.string()},
              {"latent_dims", latent_dims},
              {"epochs", epochs},
              {"workers", workers},
              {"options", options}};
}

std::string RunManifest::run_id() const {
  json j = to_json();
  j.erase("output_dir");
  j.erase("workers");
  // FNV-1a over the canonical (key-sorted) dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(command_name(command)) + "-" + buf;
}

fs::path create_run_dir(const RunManifest& manifest) {
  const fs::path dir = manifest.output_dir / manifest.run_id();
  if (fs::exists(dir)) {
    throw UsageError("run directory " + dir.string() +
                     " already exists; refusing to overwrite (choose another --out or remove it)");
  }
  fs::create_directories(dir);
  write_text(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return dir;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-') throw UsageError("bad number '" + s + "' in list '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const std::size_t lo = number(item.substr(0, dots));
      const std::size_t hi = number(item.substr(dots + 2));
      if (hi < lo) throw UsageError("empty range '" + item + "'");
      for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(number(item));
    }
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;  // stop handing out work
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw UsageError("cannot write " + tmp.string());
    out << text;
    if (!out) throw UsageError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path default_data_dir() {
  if (auto env = data::data_dir_from_env()) return *env;
  return AESPEC_DATA_DIR;
}

data::Dataset load_dataset(const std::string& spec, std::size_t max_samples) {
  data::Dataset ds;
  if (spec.rfind("synthetic:", 0) == 0) {
    unsigned long long count = 0, seed = 0;
    if (std::sscanf(spec.c_str(), "synthetic:%llu:%llu", &count, &seed) != 2 || count == 0) {
      throw UsageError("synthetic dataset spec must be synthetic:<count>:<seed>, got '" + spec + "'");
    }
    ds = data::synthetic_dataset(count, seed);
  } else {
    ds = data::load_mnist(spec.empty() ? default_data_dir() : fs::path(spec), data::Split::Train);
  }
  if (max_samples > 0 && max_samples < ds.size()) ds = ds.head(max_samples);
  return ds;
}

}  // namespace aespec::cli
