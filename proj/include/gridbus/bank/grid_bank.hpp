#pragma once

#include <string>
#include <vector>

#include "gridbus/core/types.hpp"

namespace gridbus::bank {

struct Account {
  AccountId id;
  std::string owner;
  Money initial;
  Money balance;
};

struct UsageRecord {
  AccountId consumer;
  AccountId provider;
  std::string resource;
  JobId job;
  double pe_seconds = 0.0;
  double data_mb = 0.0;
  Money amount;
  SimTime time = 0.0;
};

struct Transaction {
  std::size_t seq = 0;
  AccountId debit_account;
  AccountId credit_account;
  Money amount;  // debited from one side and credited to the other
  UsageRecord record;
};

struct Statement {
  AccountId account;
  Money opening;
  std::vector<Transaction> rows;
  Money closing;
};

/// Accounts and an append-only double-entry ledger. Charges move credit
/// between accounts and never create or destroy it.
class GridBank {
 public:
  AccountId open_account(std::string owner, Money initial_credit) {
    if (initial_credit < Money{}) throw Error(Errc::NegativeCredit, "initial credit for " + owner);
    AccountId id(accounts_.size());
    accounts_.push_back({id, std::move(owner), initial_credit, initial_credit});
    return id;
  }

  AccountId open_account(std::string owner, double initial_gd) {
    if (initial_gd < 0.0) throw Error(Errc::NegativeCredit, "initial credit for " + owner);
    return open_account(std::move(owner), Money::from_gd(initial_gd));
  }

  bool check_credit(AccountId id, Money required) const { return account(id).balance >= required; }

  const Transaction& charge(const UsageRecord& record) {
    if (record.amount < Money{}) throw Error(Errc::InvalidArgument, "negative charge");
    Account& consumer = mut(record.consumer);
    Account& provider = mut(record.provider);
    if (consumer.balance < record.amount) {
      throw Error(Errc::InsufficientFunds, consumer.owner + " cannot cover " + std::to_string(record.amount.gd()));
    }
    consumer.balance -= record.amount;
    provider.balance += record.amount;
    ledger_.push_back({ledger_.size(), record.consumer, record.provider, record.amount, record});
    return ledger_.back();
  }

  Statement statement(AccountId id) const {
    const Account& a = account(id);
    Statement s{id, a.initial, {}, a.initial};
    for (const auto& tx : ledger_) {
      bool touched = false;
      if (tx.debit_account == id) {
        s.closing -= tx.amount;
        touched = true;
      }
      if (tx.credit_account == id) {
        s.closing += tx.amount;
        touched = true;
      }
      if (touched) s.rows.push_back(tx);
    }
    return s;
  }

  const Account& account(AccountId id) const {
    if (!id.valid() || id.index() >= accounts_.size()) throw Error(Errc::UnknownAccount, "account " + std::to_string(id.value));
    return accounts_[id.index()];
  }

  Money balance(AccountId id) const { return account(id).balance; }

  Money total_balance() const {
    Money sum;
    for (const auto& a : accounts_) sum += a.balance;
    return sum;
  }

  Money total_initial() const {
    Money sum;
    for (const auto& a : accounts_) sum += a.initial;
    return sum;
  }

  const std::vector<Account>& accounts() const { return accounts_; }
  const std::vector<Transaction>& ledger() const { return ledger_; }

 private:
  Account& mut(AccountId id) {
    account(id);
    return accounts_[id.index()];
  }

  std::vector<Account> accounts_;
  std::vector<Transaction> ledger_;
};

}  // namespace gridbus::bank
