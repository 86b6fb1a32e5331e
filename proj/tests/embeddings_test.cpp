#include "groove/embeddings.hpp"

#include <fstream>

#include <gtest/gtest.h>

#include "groove/error.hpp"
#include "groove/features.hpp"
#include "test_util.hpp"

namespace groove {
namespace {

using testing::TempDir;

Corpus make_corpus(const std::vector<std::string>& ids) {
  std::vector<Track> tracks;
  std::vector<RatingSet> ratings;
  for (const auto& id : ids) {
    tracks.push_back({id, id, std::nullopt, "unused.wav", {}});
    ratings.push_back({id, 50, 50, 50, 0.0});
  }
  return Corpus(tracks, ratings);
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(Registry, DimensionsFromTheModelTable) {
  const std::map<std::string, std::size_t> expected = {{"audiomae", 6144}, {"clap", 512},    {"m2d", 768},
                                                       {"matpac", 3840},   {"musicfm", 1024}, {"muq", 512},
                                                       {"mert", 9984}};
  EXPECT_EQ(model_registry().size(), expected.size());
  for (const auto& [name, dim] : expected) EXPECT_EQ(registry_entry(name).dimension, dim) << name;
  EXPECT_TRUE(registry_entry("muq").clip_level);
  EXPECT_TRUE(registry_entry("clap").clip_level);
  EXPECT_FALSE(registry_entry("mert").clip_level);
  EXPECT_THROW(registry_entry("wav2vec"), InputError);
}

TEST(ReadEmbeddingFile, AcceptsSingleFrameMuq) {
  TempDir dir("emb");
  const Eigen::MatrixXd m = testing::gaussian_matrix(1, 512, 1);
  write_embedding_csv(dir.path() / "song.csv", m);
  const EmbeddingMatrix e = read_embedding_file(dir.path() / "song.csv", "muq");
  EXPECT_EQ(e.track_id, "song");
  EXPECT_EQ(e.model_name, "muq");
  ASSERT_EQ(e.frames.rows(), 1);
  ASSERT_EQ(e.frames.cols(), 512);
  // Nine significant digits survive the text round trip.
  EXPECT_LT(((e.frames - m).array().abs() / (m.array().abs() + 1e-300)).maxCoeff(), 1e-8);
  EXPECT_TRUE(e.warnings.empty());
}

TEST(ReadEmbeddingFile, DimensionMismatch) {
  TempDir dir("emb");
  write_embedding_csv(dir.path() / "x.csv", Eigen::MatrixXd::Zero(10, 500));
  const std::string msg = message_of([&] { read_embedding_file(dir.path() / "x.csv", "muq"); });
  EXPECT_NE(msg.find("512"), std::string::npos) << msg;
  EXPECT_NE(msg.find("500"), std::string::npos) << msg;
  write_embedding_gemb(dir.path() / "x.gemb", Eigen::MatrixXd::Zero(10, 500));
  EXPECT_THROW(read_embedding_file(dir.path() / "x.gemb", "muq"), InputError);
}

TEST(ReadEmbeddingFile, NanNamesRowAndColumn) {
  TempDir dir("emb");
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(4, 512);
  m(2, 3) = std::numeric_limits<double>::quiet_NaN();
  write_embedding_csv(dir.path() / "n.csv", m);
  const std::string msg = message_of([&] { read_embedding_file(dir.path() / "n.csv", "muq"); });
  EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column 3"), std::string::npos) << msg;

  write_embedding_gemb(dir.path() / "n.gemb", m);
  const std::string bin = message_of([&] { read_embedding_file(dir.path() / "n.gemb", "muq"); });
  EXPECT_NE(bin.find("row 2"), std::string::npos) << bin;
  EXPECT_NE(bin.find("column 3"), std::string::npos) << bin;
}

TEST(ReadEmbeddingFile, MalformedHeaders) {
  TempDir dir("emb");
  {
    std::ofstream out(dir.path() / "h.csv");
    out << "a,b\n1,2\n";
  }
  EXPECT_THROW(read_embedding_file(dir.path() / "h.csv", "muq"), InputError);
  {
    std::ofstream out(dir.path() / "h.gemb", std::ios::binary);
    out << "GEMX";
    out.put(1);
  }
  EXPECT_THROW(read_embedding_file(dir.path() / "h.gemb", "muq"), InputError);
  EXPECT_THROW(read_embedding_file(dir.path() / "h.npy", "muq"), InputError);
  EXPECT_THROW(read_embedding_file(dir.path() / "absent.csv", "muq"), InputError);
}

TEST(ReadEmbeddingFile, GembByteLayoutAndRoundTrip) {
  TempDir dir("emb");
  Eigen::MatrixXd m(2, 512);
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index c = 0; c < 512; ++c) m(r, c) = 0.25 * static_cast<double>(r * 512 + c) - 7.0;
  write_embedding_gemb(dir.path() / "g.gemb", m);
  std::ifstream in(dir.path() / "g.gemb", std::ios::binary);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_EQ(bytes.size(), 4u + 1 + 4 + 4 + 2 * 512 * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "GEMB");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5] | bytes[6] << 8 | bytes[7] << 16 | bytes[8] << 24, 2);
  EXPECT_EQ(bytes[9] | bytes[10] << 8 | bytes[11] << 16 | bytes[12] << 24, 512);
  float first;
  const unsigned char le[4] = {bytes[13], bytes[14], bytes[15], bytes[16]};
  std::memcpy(&first, le, 4);
  EXPECT_EQ(first, -7.0f);
  const EmbeddingMatrix e = read_embedding_file(dir.path() / "g.gemb", "muq");
  EXPECT_EQ(e.frames, m);  // values are exact in float32
}

TEST(PoolEmbedding, Cases) {
  EmbeddingMatrix one{"t", "muq", testing::gaussian_matrix(1, 5, 3), {}};
  EXPECT_EQ(pool_embedding(one), Eigen::VectorXd(one.frames.row(0).transpose()));

  const Eigen::VectorXd v = testing::gaussian_vector(4, 5);
  EmbeddingMatrix same{"t", "muq", v.transpose().replicate(6, 1), {}};
  EXPECT_LT((pool_embedding(same) - v).cwiseAbs().maxCoeff(), 1e-15);

  EmbeddingMatrix random{"t", "muq", testing::gaussian_matrix(7, 4, 9), {}};
  const Eigen::VectorXd pooled = pool_embedding(random);
  for (Eigen::Index c = 0; c < 4; ++c) {
    double sum = 0;
    for (Eigen::Index r = 0; r < 7; ++r) sum += random.frames(r, c);
    EXPECT_NEAR(pooled(c), sum / 7.0, 1e-12);
  }
}

TEST(Representation, Parsing) {
  EXPECT_EQ(parse_representation("muq").name(), "muq");
  EXPECT_EQ(parse_representation("muq/full").name(), "muq");
  EXPECT_EQ(parse_representation("muq/drums").name(), "muq/drums");
  EXPECT_EQ(parse_representation("muq/drums").stem, "drums");
  EXPECT_TRUE(parse_representation("mir_features").is_mir_features());
  EXPECT_THROW(parse_representation("muq/piano"), InputError);
  EXPECT_THROW(parse_representation("nope"), InputError);
  EXPECT_THROW(parse_representation("mir_features/drums"), InputError);
}

TEST(AssembleDesignMatrix, SortedRowsFromFiles) {
  TempDir dir("emb");
  const auto full = dir.path() / "muq" / "full";
  std::filesystem::create_directories(full);
  std::map<std::string, Eigen::MatrixXd> data;
  for (const std::string id : {"c", "a", "b"}) {
    data[id] = Eigen::MatrixXd::Constant(1, 512, id[0] - 'a' + 1.0);
    write_embedding_csv(full / (id + ".csv"), data[id]);
  }
  const DesignMatrix dm = assemble_design_matrix(make_corpus({"b", "c", "a"}), parse_representation("muq"),
                                                 {dir.path(), {}});
  EXPECT_EQ(dm.representation_name, "muq");
  ASSERT_EQ(dm.rows.rows(), 3);
  ASSERT_EQ(dm.rows.cols(), 512);
  EXPECT_EQ(dm.row_ids, (std::vector<std::string>{"a", "b", "c"}));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(dm.rows(i, 100), i + 1.0);

  // Pure function of directory contents.
  const DesignMatrix again = assemble_design_matrix(make_corpus({"a", "b", "c"}), parse_representation("muq"),
                                                    {dir.path(), {}});
  EXPECT_EQ(again.rows, dm.rows);
}

TEST(AssembleDesignMatrix, PoolingCommutesWithAssembly) {
  TempDir dir("emb");
  const auto stem_dir = dir.path() / "mert" / "drums";
  std::filesystem::create_directories(stem_dir);
  const Eigen::MatrixXd m1 = testing::gaussian_matrix(3, 9984, 1);
  const Eigen::MatrixXd m2 = testing::gaussian_matrix(5, 9984, 2);
  write_embedding_gemb(stem_dir / "t1.gemb", m1);
  write_embedding_gemb(stem_dir / "t2.gemb", m2);
  const DesignMatrix dm =
      assemble_design_matrix(make_corpus({"t1", "t2"}), parse_representation("mert/drums"), {dir.path(), {}});
  EXPECT_EQ(dm.representation_name, "mert/drums");
  const Eigen::VectorXd p1 = read_embedding_file(stem_dir / "t1.gemb", "mert").frames.colwise().mean();
  const Eigen::VectorXd p2 = read_embedding_file(stem_dir / "t2.gemb", "mert").frames.colwise().mean();
  EXPECT_LT((dm.rows.row(0).transpose() - p1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((dm.rows.row(1).transpose() - p2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(dm.warnings.empty());
}

TEST(AssembleDesignMatrix, MissingAndDuplicateFiles) {
  TempDir dir("emb");
  const auto full = dir.path() / "muq" / "full";
  std::filesystem::create_directories(full);
  write_embedding_csv(full / "a.csv", Eigen::MatrixXd::Zero(1, 512));
  write_embedding_csv(full / "b.csv", Eigen::MatrixXd::Zero(1, 512));
  const std::string msg = message_of(
      [&] { assemble_design_matrix(make_corpus({"a", "b", "zeta"}), parse_representation("muq"), {dir.path(), {}}); });
  EXPECT_NE(msg.find("zeta"), std::string::npos) << msg;

  write_embedding_gemb(full / "a.gemb", Eigen::MatrixXd::Zero(1, 512));
  const std::string dup = message_of(
      [&] { assemble_design_matrix(make_corpus({"a", "b"}), parse_representation("muq"), {dir.path(), {}}); });
  EXPECT_NE(dup.find("duplicate"), std::string::npos) << dup;
}

TEST(AssembleDesignMatrix, ClipLevelMultiFrameWarns) {
  TempDir dir("emb");
  const auto full = dir.path() / "clap" / "full";
  std::filesystem::create_directories(full);
  write_embedding_csv(full / "a.csv", testing::gaussian_matrix(3, 512, 4));
  const DesignMatrix dm = assemble_design_matrix(make_corpus({"a"}), parse_representation("clap"), {dir.path(), {}});
  EXPECT_EQ(dm.warnings.size(), 1u);
}

TEST(AssembleDesignMatrix, FeatureTable) {
  TempDir dir("emb");
  const auto table = dir.path() / "features.csv";
  {
    std::ofstream out(table);
    out << "id";
    for (auto name : feature_names()) out << "," << name;
    out << "\n";
    for (const std::string id : {"b", "a"}) {
      out << id;
      for (std::size_t c = 0; c < kFeatureCount; ++c) out << "," << (id == "a" ? 1.0 : 2.0) * static_cast<double>(c);
      out << "\n";
    }
  }
  const DesignMatrix dm = assemble_design_matrix(make_corpus({"a", "b"}), parse_representation("mir_features"),
                                                 {{}, table});
  ASSERT_EQ(dm.rows.rows(), 2);
  ASSERT_EQ(dm.rows.cols(), 16);
  EXPECT_EQ(dm.rows(0, 5), 5.0);
  EXPECT_EQ(dm.rows(1, 5), 10.0);
  EXPECT_THROW(
      assemble_design_matrix(make_corpus({"a", "b", "c"}), parse_representation("mir_features"), {{}, table}),
      InputError);
}

}  // namespace
}  // namespace groove
