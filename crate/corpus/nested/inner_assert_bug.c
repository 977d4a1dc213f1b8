int main() {
    int i;
    int j;
    for (i = 0; i < 3; i++) {
        for (j = 0; j < 4; j++) {
            assert(i + j != 5);
        }
    }
}
