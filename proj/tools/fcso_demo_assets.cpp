// Writes a ready-to-run demo into a directory: a graspable figurine, a flat
// finger, and a config wired to them.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fcso/shapes.hpp"
#include "fcso/stl_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate demo assets for the fcso pipeline"};
  std::string dir = "demo";
  app.add_option("dir", dir, "output directory (default: demo)");
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  try {
    fs::create_directories(dir);
    const fs::path base(dir);
    fcso::save_stl_file(fcso::make_bunny_figurine(), (base / "figurine.stl").string());
    fcso::save_stl_file(fcso::make_flat_finger(24, 24, 10), (base / "flat_finger.stl").string());

    std::ofstream cfg(base / "demo.cfg");
    cfg << "object.1.path = " << (base / "figurine.stl").string() << "\n"
        << "poses.count = 2\n"
        << "poses.seed = 12\n"
        << "sample.L = 20\n"
        << "sample.W = 20\n"
        << "sample.T = 5\n"
        << "sample.D = 4\n"
        << "sample.stride = 4\n"
        << "gripper.max_opening = 50\n"
        << "gripper.finger_stl = " << (base / "flat_finger.stl").string() << "\n"
        << "gripper.body_box = 26, 80, 50\n"
        << "limits.max_candidates_per_pose = 4\n"
        << "output.dir = " << (base / "out").string() << "\n";
    cfg.close();

    std::cout << "wrote " << (base / "figurine.stl").string() << ", "
              << (base / "flat_finger.stl").string() << ", " << (base / "demo.cfg").string()
              << "\nrun:  fcso run " << (base / "demo.cfg").string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
