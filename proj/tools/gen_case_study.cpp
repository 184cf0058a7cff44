// Regenerates the bundled case document from the built-in encoder.
#include <fstream>
#include <iostream>

#include "hwlrp/instance.hpp"

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "data/babol_case.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out << hwlrp::serialize_instance(hwlrp::case_study_instance());
    std::cout << "wrote " << path << "\n";
    return 0;
}
