#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsrtb {

/// Money per impression. Units are whatever the bid log uses (CPM in practice).
using Money = double;

struct Bid
{
  std::string advertiser_id;
  Money       amount = 0.0;
  /// Private value. Equals `amount` when the bidder is truth-telling.
  Money value = 0.0;
};

/// One sealed-bid auction for a single impression.
struct AuctionRecord
{
  std::string      auction_id;
  std::vector<Bid> bids;
  Money            reserve = 0.0;

  std::size_t size() const { return bids.size(); }
};

/// Throws InvalidAuction if the record breaks any of its invariants: empty or
/// negative bids, negative values, duplicate advertiser ids, negative reserve,
/// or no bid at or above the reserve.
void validate(AuctionRecord const &auction);

/// Square 0/1 matrix y(i, j): advertiser i holds slot j. Slot 0 is the real
/// slot, slots 1..n-1 are pseudo slots.
class AllocationMatrix
{
public:
  AllocationMatrix() = default;
  explicit AllocationMatrix(std::size_t n)
    : n_(n)
    , cells_(n * n, 0)
  {}

  std::size_t size() const { return n_; }
  std::uint8_t operator()(std::size_t advertiser, std::size_t slot) const
  {
    return cells_[advertiser * n_ + slot];
  }
  void set(std::size_t advertiser, std::size_t slot) { cells_[advertiser * n_ + slot] = 1; }

  std::size_t row_sum(std::size_t advertiser) const;
  std::size_t column_sum(std::size_t slot) const;

  bool operator==(AllocationMatrix const &) const = default;

private:
  std::size_t               n_ = 0;
  std::vector<std::uint8_t> cells_;
};

struct AllocationResult
{
  /// Admitted advertiser indices, highest bid first.
  std::vector<std::size_t> ranking;
  /// Slot held by each advertiser; empty for bids below the reserve.
  std::vector<std::optional<std::size_t>> slot_of;
  AllocationMatrix                        allocation;
  /// Filled by compute_payments().
  std::vector<Money> payments;
  std::vector<Money> utilities;
};

/// Admitted advertisers ordered by descending bid. Ties go to the higher
/// private value, then the lexicographically smaller advertiser id.
std::vector<std::size_t> rank_bids(AuctionRecord const &auction);

/// Allocates the real slot to the top bid and one pseudo slot to every other
/// admitted bidder. Payments are left empty.
AllocationResult allocate(AuctionRecord const &auction);

/// Second-price payments over real and pseudo slots: the holder of slot j pays
/// the bid ranked j+1, and the last admitted bidder pays the reserve.
/// Fills `allocation.payments` and `allocation.utilities` and returns payments.
std::vector<Money> compute_payments(AuctionRecord const &auction, AllocationResult &allocation);

/// allocate() followed by compute_payments().
AllocationResult run_auction(AuctionRecord const &auction);

}  // namespace tsrtb
