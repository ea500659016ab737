#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "frameql/connector.h"

namespace frameql::testkit {

/// Counts each contract phase and returns a canned table.
class SpyConnector : public Connector {
public:
    explicit SpyConnector(Table canned = {}) : canned_(std::move(canned)) {}

    QueryText pre_process(const QueryText& q) const override {
        std::lock_guard lock(mu_);
        ++pre;
        order.push_back('p');
        return Connector::pre_process(q);
    }
    RawResult execute(const QueryText& q) override {
        std::lock_guard lock(mu_);
        ++executes;
        order.push_back('e');
        queries.push_back(q.render());
        return RawResult{canned_};
    }
    Table post_process(RawResult raw) const override {
        std::lock_guard lock(mu_);
        ++post;
        order.push_back('o');
        return Connector::post_process(std::move(raw));
    }

    void set_result(Table t) { canned_ = std::move(t); }

    mutable int pre = 0;
    int executes = 0;
    mutable int post = 0;
    mutable std::string order;
    std::vector<std::string> queries;

private:
    mutable std::mutex mu_;
    Table canned_;
};

}  // namespace frameql::testkit
