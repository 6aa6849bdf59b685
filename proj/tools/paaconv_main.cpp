// Command-line front end: synth, normals, train, eval, predict, export-ply.
//
// Exit codes: 0 success; 1 I/O or parse failures (missing or malformed
// files); 2 configuration and validation failures (bad flag values,
// channel mismatches, refused operations).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paaconv/checkpoint.hpp"
#include "paaconv/config.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/metrics.hpp"
#include "paaconv/normals.hpp"
#include "paaconv/pipeline.hpp"
#include "paaconv/ply.hpp"
#include "paaconv/synthetic.hpp"
#include "paaconv/training.hpp"

namespace fs = std::filesystem;
using namespace paaconv;

namespace {

// Flag values shared across subcommands; optionals so a config file only
// loses against flags the user actually passed.
struct CommonFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> cell_size;
  std::optional<int> channels;
  std::optional<int> k_neighbors;
  std::optional<double> block_size;
  std::optional<int> points_per_block;
  std::optional<int> classes;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file,
                  "Config file (key = value lines)");
  cmd->add_option("--seed", flags.seed, "Seed for every random stream");
  cmd->add_option("--cell-size", flags.cell_size, "Voxel edge length, meters");
  cmd->add_option("--channels", flags.channels,
                  "Input channels: 9, or 12 with normals");
  cmd->add_option("--k-neighbors", flags.k_neighbors,
                  "Neighborhood size for normal estimation");
  cmd->add_option("--block-size", flags.block_size, "Block edge, meters");
  cmd->add_option("--points-per-block", flags.points_per_block,
                  "Points every block is resampled to");
  cmd->add_option("--classes", flags.classes, "Number of semantic classes");
}

RunConfig assemble_config(const CommonFlags& flags) {
  RunConfig rc;
  if (!flags.config_file.empty()) apply_config_file(rc, flags.config_file);
  if (flags.seed) rc.seed = *flags.seed;
  if (flags.cell_size) rc.cell_size = *flags.cell_size;
  if (flags.channels) rc.channels = *flags.channels;
  if (flags.k_neighbors) rc.k_neighbors = *flags.k_neighbors;
  if (flags.block_size) rc.block_size = *flags.block_size;
  if (flags.points_per_block) rc.points_per_block = *flags.points_per_block;
  if (flags.classes) rc.classes = *flags.classes;
  rc.train.seed = rc.seed;
  return rc;
}

std::vector<std::string> resolve_inputs(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return list_cloud_files(path);
  if (fs::is_regular_file(path, ec)) return {path};
  throw IoError("no such file or directory: " + path);
}

std::string room_file_name(int index, const char* extension) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "room_%03d.%s", index, extension);
  return buf;
}

// Aligns the run config with a loaded checkpoint. Explicit --channels or
// --cell-size win only if consistent; the checkpoint knows what it was
// trained with.
void adopt_checkpoint_config(RunConfig& rc, const Network& network,
                             const CommonFlags& flags) {
  const NetworkConfig& net = network.config();
  if (flags.channels && *flags.channels != net.in_channels) {
    throw ConfigError("channel mismatch: checkpoint expects " +
                      std::to_string(net.in_channels) + ", flags request " +
                      std::to_string(*flags.channels));
  }
  if (flags.classes && *flags.classes != net.class_count) {
    throw ConfigError("class count mismatch: checkpoint has " +
                      std::to_string(net.class_count) + ", flags request " +
                      std::to_string(*flags.classes));
  }
  rc.channels = net.in_channels;
  rc.classes = net.class_count;
  if (!flags.cell_size) rc.cell_size = net.cell_size;
}

int run_synth(const CommonFlags& flags, int rooms_flag, const RoomSpec& spec_flags,
              const std::vector<bool>& spec_set, const std::string& out_dir,
              bool write_ply_too) {
  RunConfig rc = assemble_config(flags);
  if (rooms_flag > 0) rc.synth_rooms = rooms_flag;
  // On synth, --classes means the generator's class count.
  if (flags.classes) rc.synth.classes = *flags.classes;
  // spec_set marks which RoomSpec flags were passed: points, objects,
  // noise, width, depth, height, floor_only.
  if (spec_set[0]) rc.synth.points = spec_flags.points;
  if (spec_set[1]) rc.synth.objects = spec_flags.objects;
  if (spec_set[2]) rc.synth.noise = spec_flags.noise;
  if (spec_set[3]) rc.synth.width = spec_flags.width;
  if (spec_set[4]) rc.synth.depth = spec_flags.depth;
  if (spec_set[5]) rc.synth.height = spec_flags.height;
  if (spec_set[6]) rc.synth.floor_only = spec_flags.floor_only;

  if (rc.synth_rooms < 1) throw ConfigError("synth: --rooms must be >= 1");
  rc.synth.validate();

  fs::create_directories(out_dir);
  for (int r = 0; r < rc.synth_rooms; ++r) {
    RoomSpec spec = rc.synth;
    spec.seed = rc.seed + static_cast<std::uint64_t>(r);
    const RoomCloud room = generate_synthetic_room(spec);
    const fs::path txt = fs::path(out_dir) / room_file_name(r, "txt");
    save_cloud(txt.string(), room);
    if (write_ply_too) {
      const fs::path ply = fs::path(out_dir) / room_file_name(r, "ply");
      write_ply(ply.string(), room.positions, room.labels);
    }
    std::cout << "wrote " << txt.string() << " (" << room.size() << " points)\n";
  }
  return 0;
}

int run_normals(const CommonFlags& flags, const std::string& input,
                const std::string& out_path) {
  RunConfig rc = assemble_config(flags);
  if (rc.k_neighbors < 3) throw ConfigError("normals: k-neighbors must be >= 3");

  RoomCloud room = load_cloud(input);
  if (room.size() < 3) {
    throw InvalidInputError("normals: need at least 3 points");
  }
  const NormalEstimate estimate = estimate_normals(room.positions, rc.k_neighbors);
  room.normals = estimate.normals;
  save_cloud(out_path, room);
  std::cout << "wrote " << out_path << " (" << room.size() << " points, "
            << estimate.degenerate_count << " degenerate neighborhoods)\n";
  return 0;
}

int run_train(const CommonFlags& flags, const std::string& data_dir,
              const std::string& checkpoint_path, const std::string& history_path,
              std::optional<double> lr, std::optional<double> momentum,
              std::optional<int> batch_size, std::optional<int> epochs,
              std::optional<int> checkpoint_every) {
  RunConfig rc = assemble_config(flags);
  if (lr) rc.train.learning_rate = *lr;
  if (momentum) rc.train.momentum = *momentum;
  if (batch_size) rc.train.batch_size = *batch_size;
  if (epochs) rc.train.epochs = *epochs;
  if (checkpoint_every) rc.train.checkpoint_every = *checkpoint_every;
  rc.validate();

  const auto files = resolve_inputs(data_dir);
  if (files.empty()) throw IoError("train: no .txt room files in " + data_dir);

  const LoadedDataset dataset = load_dataset(files, rc);
  if (dataset.blocks.empty()) {
    throw InvalidInputError("train: every tile fell under the occupancy floor");
  }
  std::cout << "loaded " << dataset.rooms << " rooms, "
            << dataset.blocks.size() << " blocks";
  if (rc.channels == 12) {
    std::cout << ", " << dataset.normal_fallbacks << " degenerate neighborhoods";
  }
  std::cout << "\n";

  Network network = Network::build(rc.network_config());
  std::cout << "network parameters: " << network.parameter_count() << "\n";

  const SnapshotFn snapshot = [&](const Network& net, int epoch) {
    save_checkpoint(net, checkpoint_path + ".epoch" + std::to_string(epoch));
  };
  const TrainResult result = train(network, dataset.blocks, rc.train, snapshot);

  save_checkpoint(network, checkpoint_path);
  write_history_csv(history_path, result.history);

  const EpochStats& last = result.history.back();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "epoch %d: mean_loss %.6f train_oa %.4f\n",
                last.epoch, last.mean_loss, last.train_oa);
  std::cout << buf << "wrote " << checkpoint_path << " and " << history_path
            << "\n";
  return 0;
}

int run_eval(const CommonFlags& flags, const std::string& data_path,
             const std::string& checkpoint_path, const std::string& out_dir) {
  Network network = load_checkpoint(checkpoint_path);
  RunConfig rc = assemble_config(flags);
  adopt_checkpoint_config(rc, network, flags);

  const auto files = resolve_inputs(data_path);
  if (files.empty()) throw IoError("eval: no .txt room files in " + data_path);

  std::vector<RoomCloud> rooms;
  for (const std::string& file : files) {
    RoomCloud room = load_cloud(file);
    for (int i = 0; i < room.size(); ++i) {
      if (room.labels[i] < 0) {
        throw ConfigError("eval: " + file + " point " + std::to_string(i) +
                          " is unlabeled; eval needs fully labeled data");
      }
      if (room.labels[i] >= rc.classes) {
        throw ConfigError("eval: " + file + " point " + std::to_string(i) +
                          " has label " + std::to_string(room.labels[i]) +
                          " outside the checkpoint's " +
                          std::to_string(rc.classes) + " classes");
      }
    }
    rooms.push_back(std::move(room));
  }

  const ConfusionMatrix cm = evaluate_rooms(network, rooms, rc);

  fs::create_directories(out_dir);
  const fs::path metrics_path = fs::path(out_dir) / "metrics.csv";
  const fs::path confusion_path = fs::path(out_dir) / "confusion.csv";
  write_metrics_csv(metrics_path.string(), cm);
  write_confusion_csv(confusion_path.string(), cm);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "overall_accuracy %.4f mean_class_accuracy %.4f mean_iou %.4f\n",
                overall_accuracy(cm), mean_class_accuracy(cm).value,
                mean_iou(cm).value);
  std::cout << buf << "wrote " << metrics_path.string() << " and "
            << confusion_path.string() << "\n";
  return 0;
}

int run_predict(const CommonFlags& flags, const std::string& input,
                const std::string& checkpoint_path, const std::string& out_path,
                const std::string& ply_path) {
  Network network = load_checkpoint(checkpoint_path);
  RunConfig rc = assemble_config(flags);
  adopt_checkpoint_config(rc, network, flags);

  RoomCloud room = load_cloud(input);
  const std::vector<int> predicted = predict_room(network, room, rc);

  RoomCloud out_room = room;
  out_room.labels = predicted;
  save_cloud(out_path, out_room);
  std::cout << "wrote " << out_path << " (" << out_room.size() << " points)\n";
  if (!ply_path.empty()) {
    write_ply(ply_path, out_room.positions, out_room.labels);
    std::cout << "wrote " << ply_path << "\n";
  }
  return 0;
}

int run_export_ply(const std::string& input, const std::string& out_path) {
  const RoomCloud room = load_cloud(input);
  write_ply(out_path, room.positions, room.labels);
  std::cout << "wrote " << out_path << " (" << room.size() << " vertices)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Semantic segmentation of indoor point clouds with voxel-grid atrous "
      "convolutions and attention"};
  app.require_subcommand(1);

  int exit_code = 0;

  // synth
  CommonFlags synth_flags;
  int synth_rooms = 0;
  RoomSpec synth_spec;
  std::string synth_out;
  bool synth_ply = false;
  auto* synth = app.add_subcommand("synth", "Generate synthetic labeled rooms");
  add_common_flags(synth, synth_flags);
  synth->add_option("--rooms", synth_rooms, "How many rooms to generate");
  auto* opt_points = synth->add_option("--points", synth_spec.points, "Points per room");
  auto* opt_objects = synth->add_option("--objects", synth_spec.objects,
                                        "Box objects per room");
  auto* opt_noise = synth->add_option("--noise", synth_spec.noise,
                                      "Gaussian jitter sigma, meters");
  auto* opt_width = synth->add_option("--width", synth_spec.width, "Room x extent");
  auto* opt_depth = synth->add_option("--depth", synth_spec.depth, "Room y extent");
  auto* opt_height = synth->add_option("--height", synth_spec.height, "Room z extent");
  auto* opt_floor = synth->add_flag("--floor-only", synth_spec.floor_only,
                                    "Single floor plane, every point class 0");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_flag("--ply", synth_ply, "Also write a PLY per room");
  synth->callback([&] {
    const std::vector<bool> spec_set = {
        opt_points->count() > 0, opt_objects->count() > 0,
        opt_noise->count() > 0,  opt_width->count() > 0,
        opt_depth->count() > 0,  opt_height->count() > 0,
        opt_floor->count() > 0};
    exit_code = run_synth(synth_flags, synth_rooms, synth_spec, spec_set,
                          synth_out, synth_ply);
  });

  // normals
  CommonFlags normals_flags;
  std::string normals_in, normals_out;
  auto* normals = app.add_subcommand(
      "normals", "Estimate per-point normals and write a 10-column cloud");
  add_common_flags(normals, normals_flags);
  normals->add_option("input", normals_in, "Room file")->required();
  normals->add_option("--out", normals_out, "Output room file")->required();
  normals->callback(
      [&] { exit_code = run_normals(normals_flags, normals_in, normals_out); });

  // train
  CommonFlags train_flags;
  std::string train_dir, train_checkpoint, train_history = "history.csv";
  std::optional<double> train_lr, train_momentum;
  std::optional<int> train_batch, train_epochs, train_ckpt_every;
  auto* train_cmd =
      app.add_subcommand("train", "Train a model on a directory of rooms");
  add_common_flags(train_cmd, train_flags);
  train_cmd->add_option("data", train_dir, "Directory of room .txt files")
      ->required();
  train_cmd->add_option("--checkpoint", train_checkpoint, "Checkpoint to write")
      ->required();
  train_cmd->add_option("--out", train_history,
                        "Training history CSV (epoch,mean_loss,train_oa)");
  train_cmd->add_option("--lr", train_lr, "Learning rate");
  train_cmd->add_option("--momentum", train_momentum, "Momentum coefficient");
  train_cmd->add_option("--batch-size", train_batch, "Blocks per batch");
  train_cmd->add_option("--epochs", train_epochs, "Training epochs");
  train_cmd->add_option("--checkpoint-every", train_ckpt_every,
                        "Also snapshot every N epochs");
  train_cmd->callback([&] {
    exit_code = run_train(train_flags, train_dir, train_checkpoint,
                          train_history, train_lr, train_momentum, train_batch,
                          train_epochs, train_ckpt_every);
  });

  // eval
  CommonFlags eval_flags;
  std::string eval_data, eval_checkpoint, eval_out = ".";
  auto* eval_cmd = app.add_subcommand(
      "eval", "Evaluate a checkpoint against labeled rooms");
  add_common_flags(eval_cmd, eval_flags);
  eval_cmd->add_option("data", eval_data, "Room file or directory")->required();
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint to load")
      ->required();
  eval_cmd->add_option("--out", eval_out,
                       "Directory for metrics.csv and confusion.csv");
  eval_cmd->callback([&] {
    exit_code = run_eval(eval_flags, eval_data, eval_checkpoint, eval_out);
  });

  // predict
  CommonFlags predict_flags;
  std::string predict_in, predict_checkpoint, predict_out, predict_ply;
  auto* predict_cmd = app.add_subcommand(
      "predict", "Label a room file with a trained checkpoint");
  add_common_flags(predict_cmd, predict_flags);
  predict_cmd->add_option("input", predict_in, "Room file")->required();
  predict_cmd->add_option("--checkpoint", predict_checkpoint, "Checkpoint to load")
      ->required();
  predict_cmd->add_option("--out", predict_out, "Labeled room file to write")
      ->required();
  predict_cmd->add_option("--ply", predict_ply, "Also write a colored PLY here");
  predict_cmd->callback([&] {
    exit_code = run_predict(predict_flags, predict_in, predict_checkpoint,
                            predict_out, predict_ply);
  });

  // export-ply
  std::string export_in, export_out;
  auto* export_cmd = app.add_subcommand(
      "export-ply", "Convert a labeled room file to a colored binary PLY");
  export_cmd->add_option("input", export_in, "Room file")->required();
  export_cmd->add_option("--out", export_out, "PLY path")->required();
  export_cmd->callback(
      [&] { exit_code = run_export_ply(export_in, export_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const paaconv::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const paaconv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const paaconv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
