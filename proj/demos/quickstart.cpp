// Minimal library walkthrough: build the bundled arm, sample a small labelled
// dataset, train a classifier on encoded inputs, and compare it against the
// geometric oracle on fresh configurations.

#include <cstdio>

#include "colcheck/dataset.hpp"
#include "colcheck/encoding.hpp"
#include "colcheck/evalbench.hpp"
#include "colcheck/nn.hpp"
#include "colcheck/robot.hpp"

using namespace colcheck;

int main() {
    const RobotModel robot = make_desk_arm();
    std::printf("robot '%s': %zu joints, %zu links, %zu masked pairs\n", robot.name.c_str(),
                robot.joint_count(), robot.link_count(), robot.collision_mask.size());

    const Dataset ds = sample_robot_dataset(robot, 2000, /*seed=*/0, /*threads=*/2);
    std::printf("dataset: %zu samples (train %zu / test %zu / val %zu)\n", ds.size(),
                ds.count(Split::train), ds.count(Split::test), ds.count(Split::val));

    const EncodingLevel level(1);
    Matrix<double> xtr_raw, xte_raw;
    std::vector<std::uint8_t> ytr, yte;
    ds.extract(Split::train, xtr_raw, ytr);
    ds.extract(Split::test, xte_raw, yte);
    const Matrix<float> xtr = encode_batch_f32(xtr_raw, level);
    const Matrix<float> xte = encode_batch_f32(xte_raw, level);

    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.seed = 0;
    const NetworkSpec spec = preset_spec("MLP3", xtr.cols);
    auto [params, curve] = train(spec, xtr, ytr, static_cast<const Matrix<float>*>(nullptr),
                                 nullptr, cfg);
    std::printf("trained MLP3 (input %zu): loss %.3f -> %.3f, test accuracy %.4f\n",
                spec.input_dim, curve.train_loss.front(), curve.train_loss.back(),
                accuracy_on(params, xte, yte));

    // spot-check a few fresh configurations against the geometric oracle
    Rng rng(7);
    int agree = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        JointConfig q(robot.joint_count());
        for (auto& v : q) v = rng.uniform(-M_PI, M_PI);
        const std::vector<double> enc = encode(q, level);
        const std::vector<float> xf(enc.begin(), enc.end());
        const bool predicted = forward(params, xf) >= 0.5;
        const bool actual = self_collision(robot, q);
        agree += predicted == actual;
    }
    std::printf("fresh-config agreement with the oracle: %d/%d\n", agree, n);
    return 0;
}
