#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace fixtures {

namespace {

// KDDTrain+ label histogram. Class totals: Normal 67,343 / DoS 45,927 /
// Probe 11,656 / R2L 995 / U2R 52.
constexpr AttackCount kTrainCounts[] = {
    {"normal", 67343},
    // DoS
    {"neptune", 41214},
    {"smurf", 2646},
    {"back", 956},
    {"teardrop", 892},
    {"pod", 201},
    {"land", 18},
    // Probe
    {"satan", 3633},
    {"ipsweep", 3599},
    {"portsweep", 2931},
    {"nmap", 1493},
    // R2L
    {"warezclient", 890},
    {"guess_passwd", 53},
    {"warezmaster", 20},
    {"imap", 11},
    {"ftp_write", 8},
    {"multihop", 7},
    {"phf", 4},
    {"spy", 2},
    // U2R
    {"buffer_overflow", 30},
    {"rootkit", 10},
    {"loadmodule", 9},
    {"perl", 3},
};

// Test-set histogram consistent with the class totals 9,710 / 7,458 /
// 2,421 / 2,754 / 200.
constexpr AttackCount kTestCounts[] = {
    {"normal", 9710},
    // DoS
    {"neptune", 4657},
    {"apache2", 737},
    {"processtable", 685},
    {"smurf", 665},
    {"back", 359},
    {"mailbomb", 293},
    {"pod", 41},
    {"teardrop", 12},
    {"land", 7},
    {"udpstorm", 2},
    // Probe
    {"mscan", 996},
    {"satan", 735},
    {"saint", 319},
    {"portsweep", 157},
    {"ipsweep", 141},
    {"nmap", 73},
    // R2L
    {"guess_passwd", 1231},
    {"warezmaster", 944},
    {"snmpguess", 331},
    {"snmpgetattack", 178},
    {"multihop", 18},
    {"named", 17},
    {"sendmail", 14},
    {"xlock", 9},
    {"xsnoop", 4},
    {"ftp_write", 3},
    {"worm", 2},
    {"phf", 2},
    {"imap", 1},
    // U2R
    {"httptunnel", 133},
    {"buffer_overflow", 20},
    {"ps", 15},
    {"xterm", 13},
    {"rootkit", 13},
    {"perl", 2},
    {"sqlattack", 2},
    {"loadmodule", 2},
};

struct ClassProfile {
  std::vector<const char*> protocols;
  std::vector<const char*> services;
  std::vector<const char*> flags;
  double duration_mean;
  double src_bytes_mean;
  double dst_bytes_mean;
  double count_mean;       // connections to same host (slot 22)
  double serror_rate;      // SYN error rates (slots 24, 25, 37, 38)
  double rerror_rate;      // REJ error rates (slots 26, 27, 39, 40)
  double same_srv_rate;    // slots 28, 33
  double diff_srv_rate;    // slots 29, 34
  double logged_in;        // slot 11
  double failed_logins;    // slot 10
  double hot;              // slot 9
  double root_shell;       // slot 13
  double num_root;         // slot 15
  double file_creations;   // slot 16
};

const ClassProfile& profile_for(ceids::ClassLabel label) {
  static const std::map<ceids::ClassLabel, ClassProfile> profiles = {
      {ceids::ClassLabel::Normal,
       {{"tcp", "udp"},
        {"http", "smtp", "domain_u", "ftp_data"},
        {"SF"},
        10.0, 900.0, 2500.0, 8.0, 0.01, 0.01, 0.95, 0.03, 0.9, 0.0, 0.02, 0.0, 0.0, 0.0}},
      {ceids::ClassLabel::Dos,
       {{"tcp", "icmp"},
        {"private", "ecr_i", "http"},
        {"S0", "SF", "RSTO"},
        0.5, 300.0, 5.0, 350.0, 0.85, 0.05, 0.7, 0.05, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0}},
      {ceids::ClassLabel::Probe,
       {{"tcp", "icmp", "udp"},
        {"private", "eco_i", "other", "finger"},
        {"REJ", "SF", "S0"},
        3.0, 25.0, 15.0, 90.0, 0.2, 0.55, 0.25, 0.65, 0.02, 0.0, 0.01, 0.0, 0.0, 0.0}},
      {ceids::ClassLabel::R2l,
       {{"tcp"},
        {"ftp", "telnet", "imap4", "pop_3"},
        {"SF", "RSTO"},
        60.0, 1500.0, 400.0, 3.0, 0.02, 0.1, 0.85, 0.05, 0.55, 1.6, 0.9, 0.0, 0.05, 0.1}},
      {ceids::ClassLabel::U2r,
       {{"tcp"},
        {"telnet", "ftp", "shell"},
        {"SF"},
        180.0, 2200.0, 1200.0, 2.0, 0.01, 0.02, 0.9, 0.03, 0.95, 0.1, 1.8, 0.7, 2.5, 1.8}},
  };
  return profiles.at(label);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::string format_rate(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", clamp01(v));
  return buf;
}

std::string format_count(double v) {
  return std::to_string(static_cast<long long>(std::max(0.0, std::round(v))));
}

// Small deterministic per-name nudge, so distinct attacks inside one class
// are not identical point clouds.
double name_offset(const std::string& attack, int salt) {
  const std::uint64_t h = ceids::derive_seed(static_cast<std::uint64_t>(salt), attack);
  return static_cast<double>(h % 1000) / 1000.0;
}

}  // namespace

std::span<const AttackCount> train_attack_counts() { return kTrainCounts; }
std::span<const AttackCount> test_attack_counts() { return kTestCounts; }

std::string synthetic_line(const std::string& attack, std::mt19937_64& rng, bool test_set) {
  const ceids::ClassLabel label =
      attack == "normal" ? ceids::ClassLabel::Normal : ceids::map_attack_label(attack);
  const ClassProfile* p = &profile_for(label);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  const double salt = name_offset(attack, 7);
  auto pick = [&](const std::vector<const char*>& options) {
    return options[static_cast<std::size_t>(unit(rng) * 1000.0) % options.size()];
  };

  std::string protocol = pick(p->protocols);
  std::string service = pick(p->services);
  std::string flag = pick(p->flags);
  // The real test set contains services the training set never saw.
  if (test_set && unit(rng) < 0.01) service = unit(rng) < 0.5 ? "aol" : "harvest";

  // A slice of attack traffic hides in plain sight (numeric profile drawn
  // from normal traffic), and some normal traffic is bursty; keeps the
  // classes overlapping the way the real corpus does.
  if (label != ceids::ClassLabel::Normal && unit(rng) < 0.10) {
    p = &profile_for(ceids::ClassLabel::Normal);
  } else if (label == ceids::ClassLabel::Normal && unit(rng) < 0.04) {
    p = &profile_for(ceids::ClassLabel::Dos);
  }

  const double duration =
      std::max(0.0, p->duration_mean * (0.4 + salt) * (1.0 + 0.5 * noise(rng)));
  const double src_bytes =
      std::max(0.0, p->src_bytes_mean * (0.5 + salt) * (1.0 + 0.6 * noise(rng)));
  const double dst_bytes =
      std::max(0.0, p->dst_bytes_mean * (0.5 + salt) * (1.0 + 0.6 * noise(rng)));
  const double count = std::max(1.0, p->count_mean * (0.6 + 0.8 * salt) + 25.0 * noise(rng));
  const double srv_count = std::max(1.0, count * (0.5 + 0.4 * unit(rng)));
  const double serror = clamp01(p->serror_rate + 0.15 * noise(rng));
  const double rerror = clamp01(p->rerror_rate + 0.15 * noise(rng));
  const double same_srv = clamp01(p->same_srv_rate + 0.15 * noise(rng));
  const double diff_srv = clamp01(p->diff_srv_rate + 0.15 * noise(rng));
  const bool logged_in = unit(rng) < p->logged_in;
  const double failed = std::max(0.0, p->failed_logins + (unit(rng) < 0.3 ? 1.0 : 0.0) *
                                                             (p->failed_logins > 0 ? 1.0 : 0.0));
  const double hot = std::max(0.0, p->hot * (0.5 + unit(rng)));
  const bool root_shell = unit(rng) < p->root_shell;
  const double num_root = std::max(0.0, p->num_root * (0.5 + unit(rng)));
  const double file_creations = std::max(0.0, p->file_creations * (0.5 + unit(rng)));
  const double dst_host_count = std::min(255.0, count * (0.8 + 0.4 * unit(rng)));

  std::string line;
  line += format_count(duration);                      // 0 duration
  line += "," + protocol;                              // 1 protocol_type
  line += "," + service;                               // 2 service
  line += "," + flag;                                  // 3 flag
  line += "," + format_count(src_bytes);               // 4 src_bytes
  line += "," + format_count(dst_bytes);               // 5 dst_bytes
  line += ",0";                                        // 6 land
  line += ",0";                                        // 7 wrong_fragment
  line += ",0";                                        // 8 urgent
  line += "," + format_count(hot);                     // 9 hot
  line += "," + format_count(failed);                  // 10 num_failed_logins
  line += logged_in ? ",1" : ",0";                     // 11 logged_in
  line += ",0";                                        // 12 num_compromised
  line += root_shell ? ",1" : ",0";                    // 13 root_shell
  line += ",0";                                        // 14 su_attempted
  line += "," + format_count(num_root);                // 15 num_root
  line += "," + format_count(file_creations);          // 16 num_file_creations
  line += ",0";                                        // 17 num_shells
  line += ",0";                                        // 18 num_access_files
  line += ",0";                                        // 19 num_outbound_cmds
  line += ",0";                                        // 20 is_host_login
  line += ",0";                                        // 21 is_guest_login
  line += "," + format_count(count);                   // 22 count
  line += "," + format_count(srv_count);               // 23 srv_count
  line += "," + format_rate(serror);                   // 24 serror_rate
  line += "," + format_rate(serror * 0.95);            // 25 srv_serror_rate
  line += "," + format_rate(rerror);                   // 26 rerror_rate
  line += "," + format_rate(rerror * 0.9);             // 27 srv_rerror_rate
  line += "," + format_rate(same_srv);                 // 28 same_srv_rate
  line += "," + format_rate(diff_srv);                 // 29 diff_srv_rate
  line += "," + format_rate(0.1 + 0.2 * unit(rng));    // 30 srv_diff_host_rate
  line += "," + format_count(dst_host_count);          // 31 dst_host_count
  line += "," + format_count(dst_host_count * same_srv);  // 32 dst_host_srv_count
  line += "," + format_rate(same_srv);                 // 33 dst_host_same_srv_rate
  line += "," + format_rate(diff_srv);                 // 34 dst_host_diff_srv_rate
  line += "," + format_rate(0.2 + 0.3 * unit(rng));    // 35 dst_host_same_src_port_rate
  line += "," + format_rate(0.05 + 0.1 * unit(rng));   // 36 dst_host_srv_diff_host_rate
  line += "," + format_rate(serror);                   // 37 dst_host_serror_rate
  line += "," + format_rate(serror * 0.95);            // 38 dst_host_srv_serror_rate
  line += "," + format_rate(rerror);                   // 39 dst_host_rerror_rate
  line += "," + format_rate(rerror * 0.9);             // 40 dst_host_srv_rerror_rate
  line += "," + attack;
  line += "," + std::to_string(10 + static_cast<int>(unit(rng) * 11.0));  // difficulty
  return line;
}

namespace {

void write_counted(const std::string& path, std::span<const AttackCount> counts, bool test_set,
                   std::uint64_t seed) {
  std::vector<const char*> names;
  for (const auto& [name, count] : counts) {
    names.insert(names.end(), count, name);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(names.begin(), names.end(), rng);

  std::ofstream out(path, std::ios::trunc);
  for (const char* name : names) {
    out << synthetic_line(name, rng, test_set) << '\n';
  }
}

}  // namespace

void write_synthetic_nslkdd(const std::string& path, bool test_set, std::uint64_t seed) {
  write_counted(path, test_set ? test_attack_counts() : train_attack_counts(), test_set, seed);
}

void write_synthetic_subset(const std::string& path, std::size_t lines, std::uint64_t seed) {
  std::vector<const char*> pool;
  for (const auto& [name, count] : train_attack_counts()) {
    pool.insert(pool.end(), count, name);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::ofstream out(path, std::ios::trunc);
  for (std::size_t i = 0; i < lines && i < pool.size(); ++i) {
    out << synthetic_line(pool[i], rng, false) << '\n';
  }
}

std::vector<ceids::LabeledRecord> blob_records(std::size_t per_class, std::uint64_t seed,
                                               bool test_variant) {
  // Three blobs in numeric space; classes 0/1 share blob A, 2/3 share blob B,
  // 4 sits alone in blob C. Within a blob the two classes differ strongly on
  // the count/error-rate features.
  std::mt19937_64 rng(seed + (test_variant ? 0x51ed0000u : 0u));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<ceids::LabeledRecord> data;

  const std::array<const char*, 5> services = {"http", "smtp", "ftp", "telnet", "shell"};
  const std::array<const char*, 5> attacks = {"normal", "neptune", "satan", "guess_passwd",
                                              "rootkit"};
  const std::array<double, 5> blob_base = {100.0, 100.0, 4000.0, 4000.0, 9000.0};
  const std::array<double, 5> count_level = {20.0, 400.0, 30.0, 420.0, 800.0};
  const std::array<double, 5> rate_level = {0.05, 0.9, 0.9, 0.1, 0.5};

  for (std::size_t c = 0; c < 5; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      ceids::RawRecord rec;
      rec.nominal = {"tcp", services[c], "SF"};
      rec.attack_name = attacks[c];
      auto& f = rec.numeric;
      f.fill(0.0);
      f[0] = blob_base[c] + 40.0 * noise(rng);              // duration: blob axis
      f[1] = blob_base[c] * 2.0 + 60.0 * noise(rng);        // src_bytes: blob axis
      f[2] = blob_base[c] * 0.5 + 30.0 * noise(rng);        // dst_bytes: blob axis
      f[19] = count_level[c] + 15.0 * noise(rng);           // count: class axis
      f[20] = count_level[c] * 0.8 + 10.0 * noise(rng);     // srv_count: class axis
      f[21] = std::clamp(rate_level[c] + 0.05 * noise(rng), 0.0, 1.0);
      f[22] = std::clamp(rate_level[c] * 0.9 + 0.05 * noise(rng), 0.0, 1.0);
      f[25] = std::clamp(1.0 - rate_level[c] + 0.05 * noise(rng), 0.0, 1.0);
      f[28] = count_level[c] * 0.5 + 8.0 * noise(rng);
      data.push_back({std::move(rec), static_cast<ceids::ClassLabel>(c)});
    }
  }
  std::shuffle(data.begin(), data.end(), rng);
  return data;
}

ceids::Matrix gaussian_blobs(const std::vector<std::vector<double>>& centers,
                             std::size_t per_blob, double sigma, std::uint64_t seed) {
  const std::size_t dim = centers.front().size();
  const double coord_sigma = sigma / std::sqrt(static_cast<double>(dim));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, coord_sigma);

  ceids::Matrix out(centers.size() * per_blob, dim);
  std::size_t r = 0;
  for (const auto& center : centers) {
    for (std::size_t i = 0; i < per_blob; ++i, ++r) {
      auto row = out.row(r);
      for (std::size_t d = 0; d < dim; ++d) row[d] = center[d] + noise(rng);
    }
  }
  return out;
}

std::string temp_dir() {
  static const std::string dir = [] {
    const auto base = std::filesystem::temp_directory_path() / "ceids_tests";
    std::filesystem::create_directories(base);
    std::mt19937_64 rng(std::random_device{}());
    const auto unique = base / std::to_string(rng());
    std::filesystem::create_directories(unique);
    return unique.string();
  }();
  return dir;
}

std::string temp_path(const std::string& name) { return temp_dir() + "/" + name; }

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

}  // namespace fixtures
