int main() {
    int a = 1;
    // plain comment
    assert(a == 1);
}
